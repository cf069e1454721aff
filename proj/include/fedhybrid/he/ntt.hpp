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

#ifndef FEDHYBRID_HE_NTT_HPP_
#define FEDHYBRID_HE_NTT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/he/modmath.hpp"

namespace fedhybrid::he {

inline bool is_power_of_two(std::size_t n) noexcept {
  return n > 0 && (n & (n - 1)) == 0;
}

inline std::size_t log2_exact(std::size_t n) {
  require(is_power_of_two(n), "log2_exact: not a power of two");
  std::size_t log = 0;
  while ((std::size_t{1} << log) < n) ++log;
  return log;
}

inline std::size_t reverse_bits(std::size_t value, std::size_t bit_count) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < bit_count; ++i) {
    out = (out << 1) | ((value >> i) & 1);
  }
  return out;
}

// Negacyclic NTT tables for Z_p[X]/(X^n + 1): powers of the primitive 2n-th
// root psi stored in bit-reversed order, with Shoup companions. The psi
// twist is merged into the butterflies, so forward/inverse map directly
// between coefficients and evaluations at odd powers of psi.
class NttTable {
 public:
  static NttTable create(std::size_t n, std::uint64_t modulus) {
    if (!is_power_of_two(n)) {
      throw ParameterError("NttTable: size must be a power of two");
    }
    if (!is_prime_u64(modulus) || (modulus - 1) % (2 * n) != 0) {
      throw ParameterError("NttTable: modulus " + std::to_string(modulus) +
                           " is not NTT-compatible with size " +
                           std::to_string(n));
    }
    if (modulus >= (std::uint64_t{1} << 62)) {
      throw ParameterError("NttTable: modulus must be below 2^62");
    }
    NttTable t;
    t.n_ = n;
    t.modulus_ = modulus;
    const std::size_t log_n = log2_exact(n);
    const std::uint64_t psi = find_root_of_unity_2n(2 * n, modulus);
    const std::uint64_t psi_inv = inv_mod_prime(psi, modulus);

    t.psi_brv_.resize(n);
    t.psi_brv_shoup_.resize(n);
    t.inv_psi_brv_.resize(n);
    t.inv_psi_brv_shoup_.resize(n);
    std::uint64_t power = 1;
    std::uint64_t inv_power = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t r = reverse_bits(i, log_n);
      t.psi_brv_[r] = power;
      t.inv_psi_brv_[r] = inv_power;
      power = mul_mod(power, psi, modulus);
      inv_power = mul_mod(inv_power, psi_inv, modulus);
    }
    for (std::size_t i = 0; i < n; ++i) {
      t.psi_brv_shoup_[i] = shoup_precompute(t.psi_brv_[i], modulus);
      t.inv_psi_brv_shoup_[i] = shoup_precompute(t.inv_psi_brv_[i], modulus);
    }
    t.n_inv_ = inv_mod_prime(n % modulus, modulus);
    t.n_inv_shoup_ = shoup_precompute(t.n_inv_, modulus);
    return t;
  }

  std::size_t size() const noexcept { return n_; }
  std::uint64_t modulus() const noexcept { return modulus_; }

  // In-place coefficients -> evaluations (Cooley-Tukey, merged twist).
  void forward(std::span<std::uint64_t> poly) const {
    require(poly.size() == n_, "NttTable::forward: size mismatch");
    const std::uint64_t p = modulus_;
    std::size_t t = n_;
    for (std::size_t m = 1; m < n_; m <<= 1) {
      t >>= 1;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j1 = 2 * i * t;
        const std::uint64_t w = psi_brv_[m + i];
        const std::uint64_t ws = psi_brv_shoup_[m + i];
        for (std::size_t j = j1; j < j1 + t; ++j) {
          const std::uint64_t u = poly[j];
          const std::uint64_t v = mul_mod_shoup(poly[j + t], w, ws, p);
          poly[j] = add_mod(u, v, p);
          poly[j + t] = sub_mod(u, v, p);
        }
      }
    }
  }

  // In-place evaluations -> coefficients (Gentleman-Sande, merged untwist).
  void inverse(std::span<std::uint64_t> poly) const {
    require(poly.size() == n_, "NttTable::inverse: size mismatch");
    const std::uint64_t p = modulus_;
    std::size_t t = 1;
    for (std::size_t m = n_; m > 1; m >>= 1) {
      const std::size_t h = m >> 1;
      std::size_t j1 = 0;
      for (std::size_t i = 0; i < h; ++i) {
        const std::uint64_t w = inv_psi_brv_[h + i];
        const std::uint64_t ws = inv_psi_brv_shoup_[h + i];
        for (std::size_t j = j1; j < j1 + t; ++j) {
          const std::uint64_t u = poly[j];
          const std::uint64_t v = poly[j + t];
          poly[j] = add_mod(u, v, p);
          poly[j + t] = mul_mod_shoup(sub_mod(u, v, p), w, ws, p);
        }
        j1 += 2 * t;
      }
      t <<= 1;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      poly[j] = mul_mod_shoup(poly[j], n_inv_, n_inv_shoup_, p);
    }
  }

 private:
  std::size_t n_ = 0;
  std::uint64_t modulus_ = 0;
  std::uint64_t n_inv_ = 0;
  std::uint64_t n_inv_shoup_ = 0;
  std::vector<std::uint64_t> psi_brv_;
  std::vector<std::uint64_t> psi_brv_shoup_;
  std::vector<std::uint64_t> inv_psi_brv_;
  std::vector<std::uint64_t> inv_psi_brv_shoup_;
};

// Negacyclic product of two reduced coefficient vectors via a one-off NTT.
// Callers with a long-lived modulus should hold their own NttTable instead.
inline std::vector<std::uint64_t> negacyclic_mul(
    std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
    std::uint64_t modulus) {
  require(a.size() == b.size(), "negacyclic_mul: length mismatch");
  if (!is_power_of_two(a.size())) {
    throw ParameterError("negacyclic_mul: length must be a power of two");
  }
  for (std::uint64_t x : a) {
    require(x < modulus, "negacyclic_mul: operand not reduced");
  }
  for (std::uint64_t x : b) {
    require(x < modulus, "negacyclic_mul: operand not reduced");
  }
  const NttTable table = NttTable::create(a.size(), modulus);
  std::vector<std::uint64_t> fa(a.begin(), a.end());
  std::vector<std::uint64_t> fb(b.begin(), b.end());
  table.forward(fa);
  table.forward(fb);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    fa[i] = mul_mod(fa[i], fb[i], modulus);
  }
  table.inverse(fa);
  return fa;
}

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_NTT_HPP_
