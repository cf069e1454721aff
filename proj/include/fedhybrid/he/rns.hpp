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

#ifndef FEDHYBRID_HE_RNS_HPP_
#define FEDHYBRID_HE_RNS_HPP_

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/he/modmath.hpp"

namespace fedhybrid::he {

using BigUint = boost::multiprecision::uint512_t;
using BigInt = boost::multiprecision::int512_t;

// Residue-number-system basis over pairwise distinct primes, with the CRT
// constants C_i = (q / q_i) * ((q / q_i)^-1 mod q_i) precomputed so that a
// coefficient reconstructs as sum_i x_i * C_i mod q. Fixed-width 512-bit
// integers keep reconstruction allocation-free; the total modulus is capped
// well below the headroom the accumulator needs.
class RnsBasis {
 public:
  static RnsBasis create(std::vector<std::uint64_t> primes) {
    require(!primes.empty(), "RnsBasis: at least one prime required");
    RnsBasis basis;
    basis.primes_ = std::move(primes);
    basis.modulus_ = 1;
    for (std::size_t i = 0; i < basis.primes_.size(); ++i) {
      const std::uint64_t p = basis.primes_[i];
      if (!is_prime_u64(p)) {
        throw ParameterError("RnsBasis: " + std::to_string(p) + " is not prime");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (basis.primes_[j] == p) {
          throw ParameterError("RnsBasis: duplicate prime " + std::to_string(p));
        }
      }
      basis.modulus_ *= p;
    }
    if (boost::multiprecision::msb(basis.modulus_) >= 440) {
      throw ParameterError("RnsBasis: total modulus above 2^440");
    }
    basis.half_modulus_ = basis.modulus_ >> 1;
    basis.crt_multipliers_.reserve(basis.primes_.size());
    for (const std::uint64_t p : basis.primes_) {
      const BigUint partial = basis.modulus_ / p;
      const std::uint64_t partial_mod_p =
          static_cast<std::uint64_t>(partial % p);
      const std::uint64_t inv = inv_mod_prime(partial_mod_p, p);
      basis.crt_multipliers_.push_back(partial * inv);
    }
    return basis;
  }

  std::size_t limb_count() const noexcept { return primes_.size(); }
  const std::vector<std::uint64_t>& primes() const noexcept { return primes_; }
  const BigUint& modulus() const noexcept { return modulus_; }

  // Exact reconstruction of one coefficient into the centered interval
  // (-q/2, q/2].
  BigInt to_centered_int(std::span<const std::uint64_t> residues) const {
    require(residues.size() == primes_.size(),
            "RnsBasis: residue count mismatch");
    BigUint acc = 0;
    for (std::size_t i = 0; i < residues.size(); ++i) {
      require(residues[i] < primes_[i], "RnsBasis: residue not reduced");
      acc += crt_multipliers_[i] * residues[i];
    }
    acc %= modulus_;
    if (acc > half_modulus_) {
      return BigInt(acc) - BigInt(modulus_);
    }
    return BigInt(acc);
  }

  double to_centered_double(std::span<const std::uint64_t> residues) const {
    return to_centered_int(residues).convert_to<double>();
  }

  // Residues of a small signed integer (secret/error polynomial coefficient).
  void reduce_small(std::int64_t value, std::span<std::uint64_t> out) const {
    require(out.size() == primes_.size(), "RnsBasis: output size mismatch");
    for (std::size_t i = 0; i < primes_.size(); ++i) {
      const std::uint64_t p = primes_[i];
      if (value >= 0) {
        out[i] = static_cast<std::uint64_t>(value) % p;
      } else {
        out[i] = neg_mod(static_cast<std::uint64_t>(-value) % p, p);
      }
    }
  }

 private:
  std::vector<std::uint64_t> primes_;
  BigUint modulus_ = 0;
  BigUint half_modulus_ = 0;
  std::vector<BigUint> crt_multipliers_;
};

// RNS polynomial: limbs[i][j] is coefficient j reduced modulo prime i.
struct RnsPoly {
  std::vector<std::vector<std::uint64_t>> limbs;

  std::size_t limb_count() const noexcept { return limbs.size(); }
  std::size_t degree() const noexcept {
    return limbs.empty() ? 0 : limbs.front().size();
  }

  friend bool operator==(const RnsPoly& a, const RnsPoly& b) {
    return a.limbs == b.limbs;
  }
};

inline RnsPoly make_zero_poly(std::size_t limb_count, std::size_t degree) {
  RnsPoly poly;
  poly.limbs.assign(limb_count, std::vector<std::uint64_t>(degree, 0));
  return poly;
}

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_RNS_HPP_
