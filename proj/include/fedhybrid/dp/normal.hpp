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

#ifndef FEDHYBRID_DP_NORMAL_HPP_
#define FEDHYBRID_DP_NORMAL_HPP_

#include <cmath>
#include <numbers>

namespace fedhybrid::dp {

// Standard normal CDF. erfc keeps full relative precision in the lower tail
// down to its underflow point near x = -37.5.
inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// log Phi(x). For deep negative arguments where erfc underflows, falls back
// to the asymptotic expansion erfc(t) ~ exp(-t^2) / (t sqrt(pi)) *
// (1 - 1/(2 t^2) + 3/(4 t^4)).
inline double log_std_normal_cdf(double x) {
  if (x > -8.0) return std::log(std_normal_cdf(x));
  const double t = -x / std::numbers::sqrt2;
  const double e = std::erfc(t);
  if (e > 0.0) return std::log(0.5 * e);
  const double t2 = t * t;
  const double series = 1.0 - 0.5 / t2 + 0.75 / (t2 * t2);
  return -t2 - std::log(t) - 0.5 * std::log(std::numbers::pi) +
         std::log(series) - std::numbers::ln2;
}

}  // namespace fedhybrid::dp

#endif  // FEDHYBRID_DP_NORMAL_HPP_
