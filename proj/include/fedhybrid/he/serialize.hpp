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

#ifndef FEDHYBRID_HE_SERIALIZE_HPP_
#define FEDHYBRID_HE_SERIALIZE_HPP_

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/he/params.hpp"
#include "fedhybrid/he/scheme.hpp"

namespace fedhybrid::he {

// Byte layout (everything little-endian 64-bit words):
//   [kind][params fingerprint][object metadata][per-limb length-prefixed
//   coefficient arrays]
// Deserialization revalidates the fingerprint against the caller's
// parameters and every structural invariant it can check, so corrupt or
// mismatched bytes never build an object.

enum class BlobKind : std::uint64_t {
  kCiphertext = 0x6604'0001,
  kPublicKey = 0x6604'0002,
  kSecretKey = 0x6604'0003,
  kChunkList = 0x6604'0004,
};

class ByteWriter {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      buf_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void u64_array(std::span<const std::uint64_t> values) {
    u64(values.size());
    for (std::uint64_t v : values) u64(v);
  }

  void bytes(std::span<const std::uint8_t> data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
  }

  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint64_t u64() {
    if (pos_ + 8 > data_.size()) {
      throw IoError("deserialize: truncated input");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::vector<std::uint64_t> u64_array(std::uint64_t expected_len) {
    const std::uint64_t len = u64();
    if (len != expected_len) {
      throw IoError("deserialize: unexpected array length " +
                    std::to_string(len));
    }
    std::vector<std::uint64_t> out(len);
    for (auto& v : out) v = u64();
    return out;
  }

  std::span<const std::uint8_t> raw(std::uint64_t count) {
    if (pos_ + count > data_.size()) {
      throw IoError("deserialize: truncated input");
    }
    auto out = data_.subspan(pos_, count);
    pos_ += count;
    return out;
  }

  std::size_t position() const noexcept { return pos_; }

  void expect_done() const {
    if (pos_ != data_.size()) {
      throw IoError("deserialize: trailing bytes");
    }
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline void write_poly(ByteWriter& w, const RnsPoly& poly) {
  for (const auto& limb : poly.limbs) w.u64_array(limb);
}

inline RnsPoly read_poly(ByteReader& r, const HeParams& params) {
  RnsPoly poly;
  poly.limbs.reserve(params.limb_count());
  const auto moduli = params.coeff_moduli();
  for (std::size_t i = 0; i < params.limb_count(); ++i) {
    auto limb = r.u64_array(params.ring_degree());
    for (std::uint64_t c : limb) {
      if (c >= moduli[i]) {
        throw IoError("deserialize: coefficient not reduced modulo limb prime");
      }
    }
    poly.limbs.push_back(std::move(limb));
  }
  return poly;
}

inline void check_header(ByteReader& r, BlobKind kind, const HeParams& params) {
  if (r.u64() != static_cast<std::uint64_t>(kind)) {
    throw IoError("deserialize: wrong object kind");
  }
  const std::uint64_t fp = r.u64();
  if (fp != params.fingerprint()) {
    throw ParameterError(
        "deserialize: object was produced under different parameters");
  }
}

// --- ciphertext --------------------------------------------------------------

inline std::vector<std::uint8_t> serialize_ciphertext(const HeCiphertext& ct) {
  ByteWriter w;
  w.u64(static_cast<std::uint64_t>(BlobKind::kCiphertext));
  w.u64(ct.params_fingerprint);
  w.f64(ct.scale);
  w.u64(ct.slots_used);
  w.u64(ct.addition_count);
  w.u64(ct.max_additions);
  w.u64_array(ct.moduli);
  write_poly(w, ct.c0);
  write_poly(w, ct.c1);
  return w.take();
}

inline HeCiphertext read_ciphertext_body(ByteReader& r,
                                         const HeParams& params) {
  HeCiphertext ct;
  ct.params_fingerprint = params.fingerprint();
  ct.scale = r.f64();
  ct.slots_used = r.u64();
  if (ct.slots_used > params.slot_count()) {
    throw IoError("deserialize: slots_used exceeds slot count");
  }
  ct.addition_count = r.u64();
  ct.max_additions = r.u64();
  ct.moduli = r.u64_array(params.limb_count());
  const auto expected = params.coeff_moduli();
  for (std::size_t i = 0; i < ct.moduli.size(); ++i) {
    if (ct.moduli[i] != expected[i]) {
      throw IoError("deserialize: modulus chain mismatch");
    }
  }
  ct.c0 = read_poly(r, params);
  ct.c1 = read_poly(r, params);
  return ct;
}

inline HeCiphertext deserialize_ciphertext(std::span<const std::uint8_t> bytes,
                                           const HeParams& params) {
  ByteReader r(bytes);
  check_header(r, BlobKind::kCiphertext, params);
  HeCiphertext ct = read_ciphertext_body(r, params);
  r.expect_done();
  return ct;
}

// --- keys --------------------------------------------------------------------

inline std::vector<std::uint8_t> serialize_public_key(const PublicKey& pk) {
  ByteWriter w;
  w.u64(static_cast<std::uint64_t>(BlobKind::kPublicKey));
  w.u64(pk.params_fingerprint);
  write_poly(w, pk.b);
  write_poly(w, pk.a);
  return w.take();
}

inline PublicKey deserialize_public_key(std::span<const std::uint8_t> bytes,
                                        const HeParams& params) {
  ByteReader r(bytes);
  check_header(r, BlobKind::kPublicKey, params);
  PublicKey pk;
  pk.params_fingerprint = params.fingerprint();
  pk.b = read_poly(r, params);
  pk.a = read_poly(r, params);
  r.expect_done();
  pk.b_ntt = to_ntt_form(pk.b, params);
  pk.a_ntt = to_ntt_form(pk.a, params);
  return pk;
}

// Storage/testing helper. Protocol code never calls this; the secret key
// lives and dies inside the server process.
inline std::vector<std::uint8_t> serialize_secret_key(const SecretKey& sk) {
  ByteWriter w;
  w.u64(static_cast<std::uint64_t>(BlobKind::kSecretKey));
  w.u64(sk.params_fingerprint);
  write_poly(w, sk.s);
  return w.take();
}

inline SecretKey deserialize_secret_key(std::span<const std::uint8_t> bytes,
                                        const HeParams& params) {
  ByteReader r(bytes);
  check_header(r, BlobKind::kSecretKey, params);
  SecretKey sk;
  sk.params_fingerprint = params.fingerprint();
  sk.s = read_poly(r, params);
  r.expect_done();
  sk.s_ntt = to_ntt_form(sk.s, params);
  return sk;
}

// --- chunk lists (one protected update = several packed ciphertexts) ---------

inline std::vector<std::uint8_t> serialize_ciphertext_chunks(
    std::span<const HeCiphertext> chunks) {
  ByteWriter w;
  w.u64(static_cast<std::uint64_t>(BlobKind::kChunkList));
  w.u64(chunks.size());
  for (const auto& ct : chunks) {
    const auto blob = serialize_ciphertext(ct);
    w.u64(blob.size());
    w.bytes(blob);
  }
  return w.take();
}

inline std::vector<HeCiphertext> deserialize_ciphertext_chunks(
    std::span<const std::uint8_t> bytes, const HeParams& params) {
  ByteReader r(bytes);
  if (r.u64() != static_cast<std::uint64_t>(BlobKind::kChunkList)) {
    throw IoError("deserialize: wrong object kind");
  }
  const std::uint64_t count = r.u64();
  std::vector<HeCiphertext> chunks;
  chunks.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t len = r.u64();
    chunks.push_back(deserialize_ciphertext(r.raw(len), params));
  }
  r.expect_done();
  return chunks;
}

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_SERIALIZE_HPP_
