// Copyright 2026 The FedHybrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deliberately naive reference implementations used only by the tests.
// Everything here is written independently of the library code paths it
// checks: quadratic-time polynomial products, exact big-integer arithmetic,
// direct DFT evaluation, finite differences, and brute-force numerical
// integration. Slow is fine; wrong is not.

#ifndef FEDHYBRID_TESTS_ORACLE_REFERENCE_HPP_
#define FEDHYBRID_TESTS_ORACLE_REFERENCE_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using BigInt = boost::multiprecision::cpp_int;

// Negacyclic product in Z_p[X]/(X^n + 1), schoolbook, exact via cpp_int.
inline std::vector<std::uint64_t> negacyclic_mul_schoolbook(
    const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b,
    std::uint64_t p) {
  const std::size_t n = a.size();
  std::vector<BigInt> acc(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      BigInt term = BigInt(a[i]) * BigInt(b[j]);
      const std::size_t k = i + j;
      if (k < n) {
        acc[k] += term;
      } else {
        acc[k - n] -= term;  // X^n = -1
      }
    }
  }
  std::vector<std::uint64_t> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    BigInt r = acc[k] % p;
    if (r < 0) r += p;
    out[k] = static_cast<std::uint64_t>(r);
  }
  return out;
}

// Same product with signed big-integer coefficients, no modulus.
inline std::vector<BigInt> negacyclic_mul_exact(const std::vector<BigInt>& a,
                                                const std::vector<BigInt>& b) {
  const std::size_t n = a.size();
  std::vector<BigInt> acc(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      BigInt term = a[i] * b[j];
      const std::size_t k = i + j;
      if (k < n) {
        acc[k] += term;
      } else {
        acc[k - n] -= term;
      }
    }
  }
  return acc;
}

// Evaluates p(zeta^(3^k)) directly, where zeta = exp(i*pi/n) is a primitive
// 2n-th root of unity. Slot k of the encoding of a real vector equals the
// real part of this value divided by the scale.
inline std::complex<double> eval_slot(const std::vector<double>& coeffs,
                                      std::size_t k) {
  const std::size_t n = coeffs.size();
  const std::size_t two_n = 2 * n;
  // 3^k mod 2n.
  std::uint64_t e = 1;
  for (std::size_t i = 0; i < k; ++i) e = (e * 3) % two_n;
  const double base_angle = M_PI / static_cast<double>(n);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t rot = (e * static_cast<std::uint64_t>(j)) % two_n;
    const double angle = base_angle * static_cast<double>(rot);
    acc += coeffs[j] * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return acc;
}

// Central finite-difference gradient of a scalar function of a weight vector.
inline std::vector<double> finite_diff_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> w, double h) {
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double saved = w[i];
    w[i] = saved + h;
    const double up = f(w);
    w[i] = saved - h;
    const double down = f(w);
    w[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// Hockey-stick divergence of N(0, sigma^2) vs N(sensitivity, sigma^2) at
// privacy level eps, by direct numerical integration of
// max(0, p0(x) - e^eps * p1(x)). The integrand is positive exactly on
// x < x* = sensitivity/2 - sigma^2 * eps / sensitivity, so composite
// Simpson over [x* - 40*sigma, x*] captures it to well below 1e-12.
inline double numeric_gaussian_delta(double eps, double sensitivity,
                                     double sigma) {
  const double x_star =
      sensitivity / 2.0 - sigma * sigma * eps / sensitivity;
  const double lo = x_star - 40.0 * sigma;
  const std::size_t kIntervals = 400000;  // even
  const double step = (x_star - lo) / static_cast<double>(kIntervals);
  const double inv_sigma = 1.0 / sigma;
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * M_PI));
  const double amp = std::exp(eps);
  auto integrand = [&](double x) {
    const double z0 = x * inv_sigma;
    const double z1 = (x - sensitivity) * inv_sigma;
    return norm * (std::exp(-0.5 * z0 * z0) - amp * std::exp(-0.5 * z1 * z1));
  };
  double sum = integrand(lo) + integrand(x_star);
  for (std::size_t i = 1; i < kIntervals; ++i) {
    const double x = lo + step * static_cast<double>(i);
    sum += integrand(x) * ((i % 2 == 1) ? 4.0 : 2.0);
  }
  return sum * step / 3.0;
}

}  // namespace oracle

#endif  // FEDHYBRID_TESTS_ORACLE_REFERENCE_HPP_
