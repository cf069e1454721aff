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

#ifndef FEDHYBRID_HE_MODMATH_HPP_
#define FEDHYBRID_HE_MODMATH_HPP_

#include <cstdint>
#include <string>

#include "fedhybrid/errors.hpp"

namespace fedhybrid::he {

// All moduli used by the scheme are odd primes below 2^62, so a + b never
// wraps an unsigned 64-bit accumulator.

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b,
                             std::uint64_t modulus) noexcept {
  std::uint64_t s = a + b;
  if (s >= modulus) s -= modulus;
  return s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b,
                             std::uint64_t modulus) noexcept {
  return a >= b ? a - b : a + modulus - b;
}

inline std::uint64_t neg_mod(std::uint64_t a, std::uint64_t modulus) noexcept {
  return a == 0 ? 0 : modulus - a;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b,
                             std::uint64_t modulus) noexcept {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % modulus);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exponent,
                             std::uint64_t modulus) noexcept {
  std::uint64_t result = 1 % modulus;
  base %= modulus;
  while (exponent > 0) {
    if (exponent & 1) result = mul_mod(result, base, modulus);
    base = mul_mod(base, base, modulus);
    exponent >>= 1;
  }
  return result;
}

// Inverse modulo a prime via Fermat.
inline std::uint64_t inv_mod_prime(std::uint64_t a, std::uint64_t prime) {
  require(a % prime != 0, "inv_mod_prime: zero has no inverse");
  return pow_mod(a, prime - 2, prime);
}

// Precomputed Shoup quotient floor(w * 2^64 / modulus) for fast butterflies.
inline std::uint64_t shoup_precompute(std::uint64_t w,
                                      std::uint64_t modulus) noexcept {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(w) << 64) / modulus);
}

// x * w mod modulus with w < modulus and its Shoup quotient; one 128-bit high
// product instead of a 128-bit division.
inline std::uint64_t mul_mod_shoup(std::uint64_t x, std::uint64_t w,
                                   std::uint64_t w_shoup,
                                   std::uint64_t modulus) noexcept {
  const std::uint64_t q = static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(x) * w_shoup) >> 64);
  std::uint64_t r = x * w - q * modulus;
  if (r >= modulus) r -= modulus;
  return r;
}

// Deterministic Miller-Rabin for 64-bit integers; the first twelve primes
// as witnesses cover the full range.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Primitive 2n-th root of unity modulo a prime p with p = 1 (mod 2n):
// take c^((p-1)/(2n)) for candidates c and accept when the n-th power is -1.
inline std::uint64_t find_root_of_unity_2n(std::size_t two_n,
                                           std::uint64_t prime) {
  require(two_n > 0 && (two_n & (two_n - 1)) == 0,
          "find_root_of_unity_2n: order must be a power of two");
  if ((prime - 1) % two_n != 0) {
    throw ParameterError("find_root_of_unity_2n: prime " +
                         std::to_string(prime) + " is not 1 mod " +
                         std::to_string(two_n));
  }
  const std::uint64_t exponent = (prime - 1) / two_n;
  for (std::uint64_t candidate = 2; candidate < prime; ++candidate) {
    const std::uint64_t root = pow_mod(candidate, exponent, prime);
    // root has order exactly 2n iff root^n = -1.
    if (pow_mod(root, two_n / 2, prime) == prime - 1) return root;
  }
  throw ParameterError("find_root_of_unity_2n: no root found");
}

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_MODMATH_HPP_
