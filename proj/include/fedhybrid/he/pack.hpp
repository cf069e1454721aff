// Copyright 2026 The FedHybrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDHYBRID_HE_PACK_HPP_
#define FEDHYBRID_HE_PACK_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/he/params.hpp"
#include "fedhybrid/he/scheme.hpp"
#include "fedhybrid/param_vector.hpp"
#include "fedhybrid/rng.hpp"

namespace fedhybrid::he {

// Splits a parameter vector into ceil(dim / slot_count) plaintext chunks.
// Every chunk is full except possibly the last; slots_used records the tail.
inline std::vector<HePlaintext> pack_gradient(const ParamVector& g,
                                              const HeParams& params) {
  const std::size_t slots = params.slot_count();
  std::vector<HePlaintext> chunks;
  const auto& v = g.values();
  for (std::size_t start = 0; start < v.size(); start += slots) {
    const std::size_t count = std::min(slots, v.size() - start);
    chunks.push_back(
        encode(std::span<const double>(v.data() + start, count), params));
  }
  return chunks;
}

// Inverse of pack_gradient for plaintext chunks.
inline ParamVector unpack_gradient(std::span<const HePlaintext> chunks,
                                   const HeParams& params) {
  std::vector<double> out;
  for (std::size_t c = 0; c < chunks.size(); ++c) {
    require(c + 1 == chunks.size() ||
                chunks[c].slots_used == params.slot_count(),
            "unpack_gradient: non-final chunk is not full");
    const auto values = decode(chunks[c], params);
    out.insert(out.end(), values.begin(), values.end());
  }
  return ParamVector(std::move(out));
}

// pack + encrypt, one seed per chunk derived from the caller's seed.
inline std::vector<HeCiphertext> encrypt_gradient(const ParamVector& g,
                                                  const PublicKey& pk,
                                                  const HeParams& params,
                                                  std::uint64_t rng_seed) {
  const auto plain = pack_gradient(g, params);
  std::vector<HeCiphertext> out;
  out.reserve(plain.size());
  for (std::size_t c = 0; c < plain.size(); ++c) {
    out.push_back(encrypt(plain[c], pk, params, derive_seed(rng_seed, c)));
  }
  return out;
}

// decrypt + decode + concatenate; checks the recovered length.
inline ParamVector decrypt_gradient(std::span<const HeCiphertext> chunks,
                                    const SecretKey& sk,
                                    const HeParams& params, std::size_t dim) {
  std::vector<double> out;
  out.reserve(dim);
  for (const auto& ct : chunks) {
    const auto values = decode(decrypt(ct, sk, params), params);
    out.insert(out.end(), values.begin(), values.end());
  }
  require(out.size() == dim,
          "decrypt_gradient: recovered dimension does not match");
  return ParamVector(std::move(out));
}

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_PACK_HPP_
