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

#ifndef FEDHYBRID_HE_BACKEND_HPP_
#define FEDHYBRID_HE_BACKEND_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/he/pack.hpp"
#include "fedhybrid/he/params.hpp"
#include "fedhybrid/he/scheme.hpp"
#include "fedhybrid/he/serialize.hpp"
#include "fedhybrid/param_vector.hpp"

namespace fedhybrid::he {

// Cipher-side aggregation seam. The protocol moves protected updates as
// opaque byte blobs: clients call protect, the server folds blobs together
// with combine and opens the final aggregate once. Swapping the production
// scheme for the exact mock isolates protocol arithmetic from cipher noise
// in tests.
class AggregationCipherBackend {
 public:
  virtual ~AggregationCipherBackend() = default;

  virtual std::vector<std::uint8_t> protect(const ParamVector& gradient,
                                            std::uint64_t rng_seed) const = 0;

  // Pre: at least one update; all updates carry the same dimension.
  virtual std::vector<std::uint8_t> combine(
      std::span<const std::vector<std::uint8_t>> updates) const = 0;

  virtual ParamVector open(std::span<const std::uint8_t> aggregate,
                           std::size_t dim) const = 0;

  virtual std::string_view name() const noexcept = 0;
};

// Production backend: packed additive RLWE ciphertexts. The instance owns
// the key pair, mirroring the aggregation server of the simulated protocol.
class CkksLiteBackend final : public AggregationCipherBackend {
 public:
  CkksLiteBackend(HeParams params, std::uint64_t keygen_seed)
      : params_(std::move(params)), keys_(keygen(params_, keygen_seed)) {}

  std::vector<std::uint8_t> protect(const ParamVector& gradient,
                                    std::uint64_t rng_seed) const override {
    const auto chunks =
        encrypt_gradient(gradient, keys_.public_key, params_, rng_seed);
    return serialize_ciphertext_chunks(chunks);
  }

  std::vector<std::uint8_t> combine(
      std::span<const std::vector<std::uint8_t>> updates) const override {
    require(!updates.empty(), "combine: no updates");
    auto acc = deserialize_ciphertext_chunks(updates[0], params_);
    for (std::size_t u = 1; u < updates.size(); ++u) {
      const auto chunks = deserialize_ciphertext_chunks(updates[u], params_);
      require(chunks.size() == acc.size(), "combine: chunk count mismatch");
      for (std::size_t c = 0; c < acc.size(); ++c) {
        acc[c] = add_cipher(acc[c], chunks[c]);
      }
    }
    return serialize_ciphertext_chunks(acc);
  }

  ParamVector open(std::span<const std::uint8_t> aggregate,
                   std::size_t dim) const override {
    const auto chunks = deserialize_ciphertext_chunks(aggregate, params_);
    return decrypt_gradient(chunks, keys_.secret_key, params_, dim);
  }

  std::string_view name() const noexcept override { return "ckks-lite"; }

  const HeParams& params() const noexcept { return params_; }
  const KeyPair& keys() const noexcept { return keys_; }

 private:
  HeParams params_;
  KeyPair keys_;
};

// Test oracle: transports the plaintext vector behind a tag and adds
// componentwise, so aggregation is exact. Protocol runs wired to this
// backend must match an unprotected baseline to floating-point accuracy.
class ExactMockBackend final : public AggregationCipherBackend {
 public:
  std::vector<std::uint8_t> protect(const ParamVector& gradient,
                                    std::uint64_t /*rng_seed*/) const override {
    ByteWriter w;
    w.u64(kTag);
    w.u64(gradient.dim());
    for (double v : gradient.values()) w.f64(v);
    return w.take();
  }

  std::vector<std::uint8_t> combine(
      std::span<const std::vector<std::uint8_t>> updates) const override {
    require(!updates.empty(), "combine: no updates");
    std::vector<double> acc = unwrap(updates[0]);
    for (std::size_t u = 1; u < updates.size(); ++u) {
      const auto values = unwrap(updates[u]);
      require(values.size() == acc.size(), "combine: dimension mismatch");
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += values[i];
    }
    ByteWriter w;
    w.u64(kTag);
    w.u64(acc.size());
    for (double v : acc) w.f64(v);
    return w.take();
  }

  ParamVector open(std::span<const std::uint8_t> aggregate,
                   std::size_t dim) const override {
    auto values = unwrap(aggregate);
    require(values.size() == dim, "open: dimension mismatch");
    return ParamVector(std::move(values));
  }

  std::string_view name() const noexcept override { return "exact-mock"; }

 private:
  static constexpr std::uint64_t kTag = 0x314b434f4d544741ULL;

  static std::vector<double> unwrap(std::span<const std::uint8_t> blob) {
    ByteReader r(blob);
    if (r.u64() != kTag) throw IoError("exact-mock: bad tag");
    const std::uint64_t dim = r.u64();
    std::vector<double> values(dim);
    for (auto& v : values) v = r.f64();
    r.expect_done();
    return values;
  }
};

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_BACKEND_HPP_
