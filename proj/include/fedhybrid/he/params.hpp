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

#ifndef FEDHYBRID_HE_PARAMS_HPP_
#define FEDHYBRID_HE_PARAMS_HPP_

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/he/embedding.hpp"
#include "fedhybrid/he/modmath.hpp"
#include "fedhybrid/he/ntt.hpp"
#include "fedhybrid/he/rns.hpp"

namespace fedhybrid::he {

inline constexpr double kDefaultErrorStddev = 3.2;
inline constexpr std::size_t kDefaultMaxAdditions = 64;
inline constexpr std::size_t kMinRingDegree = 1024;

// Largest prime p < 2^bits with p = 1 (mod 2n) that is not already taken.
// Walking downward keeps each limb as close to its nominal bit size as
// possible.
inline std::uint64_t find_ntt_prime(int bits, std::size_t ring_degree,
                                    std::span<const std::uint64_t> taken) {
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(ring_degree);
  const std::uint64_t upper = std::uint64_t{1} << bits;
  const std::uint64_t lower = std::uint64_t{1} << (bits - 1);
  // Largest candidate of the form k * 2n + 1 below 2^bits.
  std::uint64_t candidate = ((upper - 2) / two_n) * two_n + 1;
  for (; candidate > lower; candidate -= two_n) {
    if (!is_prime_u64(candidate)) continue;
    bool used = false;
    for (std::uint64_t t : taken) {
      if (t == candidate) {
        used = true;
        break;
      }
    }
    if (!used) return candidate;
  }
  throw ParameterError("find_ntt_prime: no " + std::to_string(bits) +
                       "-bit prime congruent to 1 mod " +
                       std::to_string(two_n));
}

// FNV-1a over every field that affects ciphertext compatibility, including
// the addition budget: mixing budgets would corrupt overflow accounting.
inline std::uint64_t hash_params(std::size_t ring_degree,
                                 std::span<const std::uint64_t> moduli,
                                 double scale, double error_stddev,
                                 std::size_t max_additions) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      h ^= (word >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(ring_degree));
  mix(static_cast<std::uint64_t>(moduli.size()));
  for (std::uint64_t q : moduli) mix(q);
  mix(std::bit_cast<std::uint64_t>(scale));
  mix(std::bit_cast<std::uint64_t>(error_stddev));
  mix(static_cast<std::uint64_t>(max_additions));
  return h;
}

// Immutable scheme parameters plus everything precomputed from them: RNS
// basis, per-limb NTT tables, the canonical embedding, and the encode
// headroom bound. Copies share one implementation.
class HeParams {
 public:
  HeParams() = default;

  static HeParams create(std::size_t ring_degree,
                         std::span<const int> coeff_modulus_bits, double scale,
                         double error_stddev = kDefaultErrorStddev,
                         std::size_t max_additions = kDefaultMaxAdditions) {
    if (!is_power_of_two(ring_degree) || ring_degree < kMinRingDegree) {
      throw ParameterError(
          "HeParams: ring degree must be a power of two >= " +
          std::to_string(kMinRingDegree));
    }
    if (coeff_modulus_bits.empty()) {
      throw ParameterError("HeParams: at least one coefficient modulus required");
    }
    for (int bits : coeff_modulus_bits) {
      if (bits < 20 || bits > 60) {
        throw ParameterError("HeParams: modulus bit sizes must lie in [20, 60]");
      }
    }
    if (!(scale >= 0x1.0p20) || !std::isfinite(scale)) {
      throw ParameterError("HeParams: scale must be finite and >= 2^20");
    }
    if (!(error_stddev > 0.0) || !std::isfinite(error_stddev)) {
      throw ParameterError("HeParams: error stddev must be positive");
    }
    if (max_additions == 0) {
      throw ParameterError("HeParams: max_additions must be positive");
    }

    auto impl = std::make_shared<Impl>();
    impl->ring_degree = ring_degree;
    impl->scale = scale;
    impl->error_stddev = error_stddev;
    impl->max_additions = max_additions;
    for (int bits : coeff_modulus_bits) {
      impl->moduli.push_back(find_ntt_prime(bits, ring_degree, impl->moduli));
    }
    impl->basis = RnsBasis::create(impl->moduli);
    impl->ntt_tables.reserve(impl->moduli.size());
    for (std::uint64_t q : impl->moduli) {
      impl->ntt_tables.push_back(NttTable::create(ring_degree, q));
    }
    impl->embedding = std::make_unique<CanonicalEmbedding>(ring_degree);
    impl->fingerprint = hash_params(ring_degree, impl->moduli, scale,
                                    error_stddev, max_additions);

    // A fresh encoding must keep max_additions sums away from the modulus
    // wall: |coefficient| < q / (2 * max_additions), with a 2x safety margin
    // for embedding spread and accumulated encryption noise.
    const double q_total = impl->basis.modulus().convert_to<double>();
    impl->coeff_bound = q_total / (4.0 * static_cast<double>(max_additions));
    return HeParams(std::move(impl));
  }

  bool valid() const noexcept { return impl_ != nullptr; }

  std::size_t ring_degree() const { return impl().ring_degree; }
  std::size_t slot_count() const { return impl().ring_degree / 2; }
  double scale() const { return impl().scale; }
  double error_stddev() const { return impl().error_stddev; }
  std::size_t max_additions() const { return impl().max_additions; }
  std::span<const std::uint64_t> coeff_moduli() const {
    return impl().moduli;
  }
  std::size_t limb_count() const { return impl().moduli.size(); }
  const RnsBasis& basis() const { return impl().basis; }
  const NttTable& ntt(std::size_t limb) const {
    require(limb < impl().ntt_tables.size(), "HeParams: limb out of range");
    return impl().ntt_tables[limb];
  }
  const CanonicalEmbedding& embedding() const { return *impl().embedding; }
  double coeff_bound() const { return impl().coeff_bound; }
  std::uint64_t fingerprint() const { return impl().fingerprint; }

 private:
  struct Impl {
    std::size_t ring_degree = 0;
    double scale = 0.0;
    double error_stddev = 0.0;
    std::size_t max_additions = 0;
    std::vector<std::uint64_t> moduli;
    RnsBasis basis;
    std::vector<NttTable> ntt_tables;
    std::unique_ptr<CanonicalEmbedding> embedding;
    double coeff_bound = 0.0;
    std::uint64_t fingerprint = 0;
  };

  explicit HeParams(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}

  const Impl& impl() const {
    require(impl_ != nullptr, "HeParams: using default-constructed parameters");
    return *impl_;
  }

  std::shared_ptr<const Impl> impl_;
};

// Named constructor matching the simulator's public surface.
inline HeParams gen_params(std::size_t ring_degree,
                           std::span<const int> coeff_modulus_bits,
                           double scale,
                           double error_stddev = kDefaultErrorStddev,
                           std::size_t max_additions = kDefaultMaxAdditions) {
  return HeParams::create(ring_degree, coeff_modulus_bits, scale, error_stddev,
                          max_additions);
}

// Reference evaluation preset: degree-16384 ring (8192 real slots),
// 100-bit modulus chain, scale 2^40.
inline HeParams paper_params() {
  const int bits[] = {40, 20, 40};
  return HeParams::create(16384, bits, 0x1.0p40);
}

// Small, fast preset for unit tests and laptop runs.
inline HeParams desk_params() {
  const int bits[] = {60, 40};
  return HeParams::create(4096, bits, 0x1.0p30);
}

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_PARAMS_HPP_
