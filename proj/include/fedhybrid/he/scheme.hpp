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

#ifndef FEDHYBRID_HE_SCHEME_HPP_
#define FEDHYBRID_HE_SCHEME_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/he/params.hpp"
#include "fedhybrid/he/rns.hpp"
#include "fedhybrid/rng.hpp"

namespace fedhybrid::he {

// Additive-only RLWE scheme over R_q = Z_q[X]/(X^n + 1): fixed-point encoded
// plaintexts, public-key encryption, decryption, and ciphertext addition.
// No relinearization, rescaling or multiplication exists anywhere in this
// code base; the addition budget is the only levelled state.

struct HePlaintext {
  RnsPoly poly;
  double scale = 0.0;
  std::size_t slots_used = 0;
  std::uint64_t params_fingerprint = 0;

  friend bool operator==(const HePlaintext& x, const HePlaintext& y) {
    return x.poly == y.poly && x.scale == y.scale &&
           x.slots_used == y.slots_used &&
           x.params_fingerprint == y.params_fingerprint;
  }
};

struct HeCiphertext {
  RnsPoly c0;
  RnsPoly c1;
  // Prime values of the RNS basis, copied from the parameters at encryption
  // so that ciphertext addition needs no parameter object.
  std::vector<std::uint64_t> moduli;
  double scale = 0.0;
  std::size_t slots_used = 0;
  std::uint64_t addition_count = 0;
  std::uint64_t max_additions = 0;
  std::uint64_t params_fingerprint = 0;

  friend bool operator==(const HeCiphertext& x, const HeCiphertext& y) {
    return x.c0 == y.c0 && x.c1 == y.c1 && x.moduli == y.moduli &&
           x.scale == y.scale && x.slots_used == y.slots_used &&
           x.addition_count == y.addition_count &&
           x.max_additions == y.max_additions &&
           x.params_fingerprint == y.params_fingerprint;
  }
};

// The secret key stays in server memory; nothing on the protocol transport
// path ever serializes it.
struct SecretKey {
  RnsPoly s;
  RnsPoly s_ntt;  // cached evaluation form, derived, never serialized
  std::uint64_t params_fingerprint = 0;

  friend bool operator==(const SecretKey& x, const SecretKey& y) {
    return x.s == y.s && x.params_fingerprint == y.params_fingerprint;
  }
};

struct PublicKey {
  RnsPoly b;  // b = -(a * s) + e
  RnsPoly a;
  RnsPoly b_ntt;  // cached evaluation forms, derived, never serialized
  RnsPoly a_ntt;
  std::uint64_t params_fingerprint = 0;

  friend bool operator==(const PublicKey& x, const PublicKey& y) {
    return x.b == y.b && x.a == y.a &&
           x.params_fingerprint == y.params_fingerprint;
  }
};

struct KeyPair {
  SecretKey secret_key;
  PublicKey public_key;
};

// --- seeded samplers -------------------------------------------------------

inline std::vector<std::int64_t> sample_ternary(std::size_t n,
                                                std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::vector<std::int64_t> out(n);
  for (auto& c : out) {
    c = static_cast<std::int64_t>(uniform_below(engine, 3)) - 1;
  }
  return out;
}

inline std::vector<std::int64_t> sample_gaussian_int(std::size_t n,
                                                     double stddev,
                                                     std::uint64_t seed) {
  GaussianSampler gauss(seed);
  std::vector<std::int64_t> out(n);
  for (auto& c : out) c = std::llround(gauss.sample(0.0, stddev));
  return out;
}

inline RnsPoly sample_uniform_poly(const HeParams& params,
                                   std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  RnsPoly poly = make_zero_poly(params.limb_count(), params.ring_degree());
  const auto moduli = params.coeff_moduli();
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    for (auto& c : poly.limbs[i]) c = uniform_below(engine, moduli[i]);
  }
  return poly;
}

inline RnsPoly small_to_rns(std::span<const std::int64_t> coeffs,
                            const HeParams& params) {
  require(coeffs.size() == params.ring_degree(),
          "small_to_rns: coefficient count mismatch");
  RnsPoly poly = make_zero_poly(params.limb_count(), params.ring_degree());
  const auto moduli = params.coeff_moduli();
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const std::uint64_t p = moduli[i];
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      const std::int64_t v = coeffs[j];
      poly.limbs[i][j] = v >= 0
                             ? static_cast<std::uint64_t>(v) % p
                             : neg_mod(static_cast<std::uint64_t>(-v) % p, p);
    }
  }
  return poly;
}

inline RnsPoly to_ntt_form(const RnsPoly& poly, const HeParams& params) {
  RnsPoly out = poly;
  for (std::size_t i = 0; i < out.limb_count(); ++i) {
    params.ntt(i).forward(out.limbs[i]);
  }
  return out;
}

// --- encode / decode --------------------------------------------------------

inline HePlaintext encode(std::span<const double> values,
                          const HeParams& params) {
  require(values.size() <= params.slot_count(),
          "encode: more values than available slots");
  for (double v : values) require(std::isfinite(v), "encode: non-finite value");

  const std::vector<double> coeffs =
      params.embedding().slots_to_coeffs(values, params.scale());
  // Conversion below goes through 128-bit integers; the headroom bound is
  // far tighter than that for every supported modulus chain, but clamp
  // anyway so the cast can never be the first thing to break.
  const double bound = std::min(params.coeff_bound(), 0x1.0p126);

  HePlaintext pt;
  pt.poly = make_zero_poly(params.limb_count(), params.ring_degree());
  const auto moduli = params.coeff_moduli();
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const double c = coeffs[j];
    if (!(std::abs(c) < bound)) {
      throw EncodingError(
          "encode: scaled coefficient exceeds the modulus headroom for " +
          std::to_string(params.max_additions()) + " additions");
    }
    const double rounded = std::round(c);
    const bool negative = rounded < 0.0;
    const auto magnitude =
        static_cast<unsigned __int128>(negative ? -rounded : rounded);
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      const std::uint64_t p = moduli[i];
      const auto r = static_cast<std::uint64_t>(magnitude % p);
      pt.poly.limbs[i][j] = negative ? neg_mod(r, p) : r;
    }
  }
  pt.scale = params.scale();
  pt.slots_used = values.size();
  pt.params_fingerprint = params.fingerprint();
  return pt;
}

inline std::vector<double> decode(const HePlaintext& pt,
                                  const HeParams& params) {
  require(pt.params_fingerprint == params.fingerprint(),
          "decode: plaintext was produced under different parameters");
  require(pt.poly.limb_count() == params.limb_count() &&
              pt.poly.degree() == params.ring_degree(),
          "decode: malformed plaintext polynomial");
  require(pt.scale > 0.0, "decode: non-positive scale");

  std::vector<double> coeffs(params.ring_degree());
  std::vector<std::uint64_t> residues(params.limb_count());
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    for (std::size_t i = 0; i < residues.size(); ++i) {
      residues[i] = pt.poly.limbs[i][j];
    }
    coeffs[j] = params.basis().to_centered_double(residues);
  }
  return params.embedding().coeffs_to_slots(coeffs, pt.scale, pt.slots_used);
}

// --- key generation ---------------------------------------------------------

inline KeyPair keygen(const HeParams& params, std::uint64_t rng_seed) {
  const std::size_t n = params.ring_degree();
  const auto moduli = params.coeff_moduli();

  const auto s_small = sample_ternary(n, derive_seed(rng_seed, 1));
  const auto e_small =
      sample_gaussian_int(n, params.error_stddev(), derive_seed(rng_seed, 2));

  KeyPair keys;
  keys.secret_key.s = small_to_rns(s_small, params);
  keys.secret_key.s_ntt = to_ntt_form(keys.secret_key.s, params);
  keys.secret_key.params_fingerprint = params.fingerprint();

  PublicKey& pk = keys.public_key;
  pk.a = sample_uniform_poly(params, derive_seed(rng_seed, 3));
  pk.a_ntt = to_ntt_form(pk.a, params);
  pk.b = make_zero_poly(params.limb_count(), n);
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const std::uint64_t p = moduli[i];
    std::vector<std::uint64_t> prod(n);
    for (std::size_t j = 0; j < n; ++j) {
      prod[j] = mul_mod(pk.a_ntt.limbs[i][j], keys.secret_key.s_ntt.limbs[i][j], p);
    }
    params.ntt(i).inverse(prod);
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t e = e_small[j];
      const std::uint64_t e_res =
          e >= 0 ? static_cast<std::uint64_t>(e) % p
                 : neg_mod(static_cast<std::uint64_t>(-e) % p, p);
      pk.b.limbs[i][j] = add_mod(neg_mod(prod[j], p), e_res, p);
    }
  }
  pk.b_ntt = to_ntt_form(pk.b, params);
  pk.params_fingerprint = params.fingerprint();
  return keys;
}

// --- encrypt / decrypt / add ------------------------------------------------

inline HeCiphertext encrypt(const HePlaintext& pt, const PublicKey& pk,
                            const HeParams& params, std::uint64_t rng_seed) {
  require(pt.params_fingerprint == params.fingerprint() &&
              pk.params_fingerprint == params.fingerprint(),
          "encrypt: plaintext/key/parameter mismatch");
  require(pt.poly.limb_count() == params.limb_count() &&
              pt.poly.degree() == params.ring_degree(),
          "encrypt: malformed plaintext polynomial");

  const std::size_t n = params.ring_degree();
  const auto moduli = params.coeff_moduli();
  const auto v_small = sample_ternary(n, derive_seed(rng_seed, 1));
  const auto e0_small =
      sample_gaussian_int(n, params.error_stddev(), derive_seed(rng_seed, 2));
  const auto e1_small =
      sample_gaussian_int(n, params.error_stddev(), derive_seed(rng_seed, 3));

  HeCiphertext ct;
  ct.c0 = make_zero_poly(params.limb_count(), n);
  ct.c1 = make_zero_poly(params.limb_count(), n);

  std::vector<std::uint64_t> v_ntt(n);
  std::vector<std::uint64_t> work(n);
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const std::uint64_t p = moduli[i];
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t v = v_small[j];
      v_ntt[j] = v >= 0 ? static_cast<std::uint64_t>(v)
                        : neg_mod(static_cast<std::uint64_t>(-v), p);
    }
    params.ntt(i).forward(v_ntt);

    // c0 = v * b + e0 + m
    for (std::size_t j = 0; j < n; ++j) {
      work[j] = mul_mod(v_ntt[j], pk.b_ntt.limbs[i][j], p);
    }
    params.ntt(i).inverse(work);
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t e = e0_small[j];
      const std::uint64_t e_res =
          e >= 0 ? static_cast<std::uint64_t>(e) % p
                 : neg_mod(static_cast<std::uint64_t>(-e) % p, p);
      ct.c0.limbs[i][j] =
          add_mod(add_mod(work[j], e_res, p), pt.poly.limbs[i][j], p);
    }

    // c1 = v * a + e1
    for (std::size_t j = 0; j < n; ++j) {
      work[j] = mul_mod(v_ntt[j], pk.a_ntt.limbs[i][j], p);
    }
    params.ntt(i).inverse(work);
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t e = e1_small[j];
      const std::uint64_t e_res =
          e >= 0 ? static_cast<std::uint64_t>(e) % p
                 : neg_mod(static_cast<std::uint64_t>(-e) % p, p);
      ct.c1.limbs[i][j] = add_mod(work[j], e_res, p);
    }
  }

  ct.moduli.assign(moduli.begin(), moduli.end());
  ct.scale = pt.scale;
  ct.slots_used = pt.slots_used;
  ct.addition_count = 0;
  ct.max_additions = params.max_additions();
  ct.params_fingerprint = params.fingerprint();
  return ct;
}

inline HePlaintext decrypt(const HeCiphertext& ct, const SecretKey& sk,
                           const HeParams& params) {
  require(ct.params_fingerprint == params.fingerprint() &&
              sk.params_fingerprint == params.fingerprint(),
          "decrypt: ciphertext/key/parameter mismatch");
  require(ct.c0.limb_count() == params.limb_count() &&
              ct.c0.degree() == params.ring_degree() &&
              ct.c1.limb_count() == params.limb_count() &&
              ct.c1.degree() == params.ring_degree(),
          "decrypt: malformed ciphertext");

  const std::size_t n = params.ring_degree();
  const auto moduli = params.coeff_moduli();
  HePlaintext pt;
  pt.poly = make_zero_poly(params.limb_count(), n);
  std::vector<std::uint64_t> work(n);
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const std::uint64_t p = moduli[i];
    work.assign(ct.c1.limbs[i].begin(), ct.c1.limbs[i].end());
    params.ntt(i).forward(work);
    for (std::size_t j = 0; j < n; ++j) {
      work[j] = mul_mod(work[j], sk.s_ntt.limbs[i][j], p);
    }
    params.ntt(i).inverse(work);
    for (std::size_t j = 0; j < n; ++j) {
      pt.poly.limbs[i][j] = add_mod(ct.c0.limbs[i][j], work[j], p);
    }
  }
  pt.scale = ct.scale;
  pt.slots_used = ct.slots_used;
  pt.params_fingerprint = ct.params_fingerprint;
  return pt;
}

// Homomorphic addition: componentwise modular addition of both components.
// Scale, slot count and parameters must match exactly; the addition budget
// is charged one unit plus whatever the operands already carry.
inline HeCiphertext add_cipher(const HeCiphertext& x, const HeCiphertext& y) {
  require(x.params_fingerprint == y.params_fingerprint && x.moduli == y.moduli,
          "add_cipher: ciphertexts use different parameters");
  require(x.scale == y.scale, "add_cipher: scale mismatch");
  require(x.slots_used == y.slots_used, "add_cipher: slot count mismatch");
  require(x.c0.limb_count() == y.c0.limb_count() &&
              x.c0.degree() == y.c0.degree() &&
              x.c0.limb_count() == x.moduli.size(),
          "add_cipher: shape mismatch");
  const std::uint64_t combined = x.addition_count + y.addition_count + 1;
  if (combined > x.max_additions) {
    throw NoiseBudgetError("add_cipher: addition budget of " +
                           std::to_string(x.max_additions) + " exhausted");
  }

  HeCiphertext out = x;
  out.addition_count = combined;
  for (std::size_t i = 0; i < out.c0.limb_count(); ++i) {
    const std::uint64_t p = out.moduli[i];
    for (std::size_t j = 0; j < out.c0.degree(); ++j) {
      out.c0.limbs[i][j] = add_mod(out.c0.limbs[i][j], y.c0.limbs[i][j], p);
      out.c1.limbs[i][j] = add_mod(out.c1.limbs[i][j], y.c1.limbs[i][j], p);
    }
  }
  return out;
}

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_SCHEME_HPP_
