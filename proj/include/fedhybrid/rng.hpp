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

#ifndef FEDHYBRID_RNG_HPP_
#define FEDHYBRID_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "fedhybrid/errors.hpp"

namespace fedhybrid {

// SplitMix64 finalizer. Used only to derive seeds, never as the stream
// generator itself.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed from a parent seed and a stream label. Chaining labels gives
// stable, non-overlapping streams per (client, round, purpose).
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::uint64_t label) noexcept {
  return splitmix64(parent ^ splitmix64(label + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a,
                                    std::uint64_t b) noexcept {
  return derive_seed(derive_seed(parent, a), b);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a,
                                    std::uint64_t b,
                                    std::uint64_t c) noexcept {
  return derive_seed(derive_seed(parent, a, b), c);
}

// Top 53 bits of x mapped to [0, 1).
inline double to_unit_interval(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline double uniform_unit(std::mt19937_64& engine) {
  return to_unit_interval(engine());
}

// Unbiased draw from [0, bound) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& engine,
                                   std::uint64_t bound) {
  require(bound > 0, "uniform_below: bound must be positive");
  const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t x = engine();
    if (x >= threshold) return x % bound;
  }
}

// Deterministic Gaussian stream: Box-Muller over mt19937_64. Hand-rolled so
// the draw sequence is identical across standard libraries, which
// std::normal_distribution does not guarantee.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double standard() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform_unit(engine_);
    const double u2 = uniform_unit(engine_);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double sample(double mean, double stddev) {
    return mean + stddev * standard();
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fedhybrid

#endif  // FEDHYBRID_RNG_HPP_
