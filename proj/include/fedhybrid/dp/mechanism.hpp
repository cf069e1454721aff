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

#ifndef FEDHYBRID_DP_MECHANISM_HPP_
#define FEDHYBRID_DP_MECHANISM_HPP_

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fedhybrid/dp/normal.hpp"
#include "fedhybrid/errors.hpp"
#include "fedhybrid/param_vector.hpp"
#include "fedhybrid/rng.hpp"

namespace fedhybrid::dp {

inline void check_budget(double epsilon, double delta) {
  require_param(std::isfinite(epsilon) && epsilon > 0.0,
          "privacy budget: epsilon must be positive");
  require_param(delta > 0.0 && delta < 1.0,
          "privacy budget: delta must lie in (0, 1)");
}

// Textbook Gaussian-mechanism bound sigma = sensitivity * sqrt(2 ln(1.25/delta)) / epsilon.
// Valid for epsilon <= 1 but safe (conservative) everywhere we use it, as an
// upper bracket for calibration.
inline double classical_gaussian_sigma(double epsilon, double delta,
                                       double sensitivity) {
  check_budget(epsilon, delta);
  require_param(sensitivity > 0.0, "classical_gaussian_sigma: sensitivity must be positive");
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

// Exact delta achieved by Gaussian noise of scale sigma at budget epsilon for
// an l2 sensitivity:
//   delta(sigma) = Phi(s/(2 sigma) - eps sigma/s) - e^eps Phi(-s/(2 sigma) - eps sigma/s).
// The second term is assembled in log space so it survives far tails.
inline double gaussian_mechanism_delta(double epsilon, double sensitivity,
                                       double sigma) {
  require_param(std::isfinite(epsilon) && epsilon > 0.0,
                "gaussian_mechanism_delta: epsilon must be positive");
  require_param(sensitivity > 0.0,
                "gaussian_mechanism_delta: sensitivity must be positive");
  require_param(sigma > 0.0, "gaussian_mechanism_delta: sigma must be positive");
  const double a = sensitivity / (2.0 * sigma);
  const double b = epsilon * sigma / sensitivity;
  const double first = std_normal_cdf(a - b);
  const double second = std::exp(epsilon + log_std_normal_cdf(-a - b));
  return first - second;
}

// True iff noise scale sigma meets the (epsilon, delta) target.
inline bool verify_dp_condition(double epsilon, double delta,
                                double sensitivity, double sigma) {
  check_budget(epsilon, delta);
  return gaussian_mechanism_delta(epsilon, sensitivity, sigma) <= delta;
}

// Smallest sigma whose achieved delta is <= the target, to relative
// tolerance 1e-6. Bisection between a tiny lower bound and the classical
// bound, growing the upper bracket if the classical bound ever falls short.
inline double calibrate_sigma(double epsilon, double delta,
                              double sensitivity) {
  check_budget(epsilon, delta);
  require_param(sensitivity > 0.0, "calibrate_sigma: sensitivity must be positive");

  double hi = classical_gaussian_sigma(epsilon, delta, sensitivity);
  for (int grow = 0;
       gaussian_mechanism_delta(epsilon, sensitivity, hi) > delta; ++grow) {
    if (grow >= 10) {
      throw InternalError("calibrate_sigma: upper bracket failed to satisfy delta");
    }
    hi *= 2.0;
  }
  double lo = 1e-6 * sensitivity;
  if (gaussian_mechanism_delta(epsilon, sensitivity, lo) <= delta) {
    // Degenerate budget: even near-zero noise satisfies it.
    return lo;
  }

  int iterations = 0;
  while (hi - lo > 1e-6 * hi) {
    if (++iterations > 200) {
      throw InternalError("calibrate_sigma: bisection did not converge");
    }
    const double mid = 0.5 * (lo + hi);
    if (gaussian_mechanism_delta(epsilon, sensitivity, mid) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Which neighbouring-dataset relation the sensitivity is computed under.
// Add/remove-one gives sensitivity C for a clipped per-client update;
// replace-one doubles it.
enum class Adjacency { kAddRemove, kReplaceOne };

inline double sensitivity_for(Adjacency adjacency, double clip_norm) {
  return adjacency == Adjacency::kAddRemove ? clip_norm : 2.0 * clip_norm;
}

// Immutable bundle of budget, clip bound and the calibrated noise scale.
// Protocol code obtains sigma exclusively through calibrated(); the
// with_sigma() factory exists for baselines and tests that need to force a
// noise level (e.g. sigma = 0 when checking exact-aggregation equivalence).
class PrivacyParams {
 public:
  static PrivacyParams calibrated(double epsilon, double delta,
                                  double clip_norm,
                                  Adjacency adjacency = Adjacency::kAddRemove) {
    check_budget(epsilon, delta);
    require_param(clip_norm > 0.0, "PrivacyParams: clip_norm must be positive");
    const double sens = sensitivity_for(adjacency, clip_norm);
    return PrivacyParams(epsilon, delta, clip_norm, sens,
                         calibrate_sigma(epsilon, delta, sens));
  }

  static PrivacyParams with_sigma(double epsilon, double delta,
                                  double clip_norm, double sigma,
                                  Adjacency adjacency = Adjacency::kAddRemove) {
    check_budget(epsilon, delta);
    require_param(clip_norm > 0.0, "PrivacyParams: clip_norm must be positive");
    require_param(sigma >= 0.0, "PrivacyParams: sigma must be non-negative");
    return PrivacyParams(epsilon, delta, clip_norm,
                         sensitivity_for(adjacency, clip_norm), sigma);
  }

  double epsilon() const noexcept { return epsilon_; }
  double delta() const noexcept { return delta_; }
  double clip_norm() const noexcept { return clip_norm_; }
  double sensitivity() const noexcept { return sensitivity_; }
  double sigma() const noexcept { return sigma_; }

 private:
  PrivacyParams(double epsilon, double delta, double clip_norm,
                double sensitivity, double sigma)
      : epsilon_(epsilon),
        delta_(delta),
        clip_norm_(clip_norm),
        sensitivity_(sensitivity),
        sigma_(sigma) {}

  double epsilon_;
  double delta_;
  double clip_norm_;
  double sensitivity_;
  double sigma_;
};

// l2 clipping: g * min(1, C / ||g||). Vectors already inside the ball pass
// through bit-exactly. The scaling factor is shaved by 2^-40 so that the
// clipped norm stays <= C under floating-point rounding, which also makes
// clipping exactly idempotent.
inline ParamVector clip(const ParamVector& g, double clip_norm) {
  require_param(std::isfinite(clip_norm) && clip_norm > 0.0,
          "clip: clip_norm must be positive");
  const double norm = g.l2_norm();
  if (norm <= clip_norm) return g;
  const double factor = (clip_norm / norm) * (1.0 - 0x1.0p-40);
  return scale(g, factor);
}

// Adds iid N(0, sigma^2) noise from the seeded stream, one draw per
// coordinate in index order. sigma = 0 returns the input bit-exactly.
inline ParamVector add_noise(const ParamVector& g, double sigma,
                             std::uint64_t rng_seed) {
  require_param(std::isfinite(sigma) && sigma >= 0.0,
          "add_noise: sigma must be non-negative");
  if (sigma == 0.0) return g;
  GaussianSampler gauss(rng_seed);
  std::vector<double> out(g.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = g.values()[i] + sigma * gauss.standard();
  }
  return ParamVector(std::move(out));
}

// Clip-then-noise, exactly the two primitives in sequence.
inline ParamVector dp_protect(const ParamVector& g, const PrivacyParams& params,
                              std::uint64_t rng_seed) {
  return add_noise(clip(g, params.clip_norm()), params.sigma(), rng_seed);
}

}  // namespace fedhybrid::dp

#endif  // FEDHYBRID_DP_MECHANISM_HPP_
