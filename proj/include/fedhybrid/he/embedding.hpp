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

#ifndef FEDHYBRID_HE_EMBEDDING_HPP_
#define FEDHYBRID_HE_EMBEDDING_HPP_

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/he/ntt.hpp"

namespace fedhybrid::he {

// Canonical embedding between n/2 real slots and length-n real polynomial
// coefficients. Slot k corresponds to evaluation at zeta^(3^k) where zeta is
// a primitive 2n-th complex root of unity; the generator-3 ordering makes
// slot values stable under the usual automorphism indexing. Slots are placed
// together with their conjugates so that the inverse transform lands on real
// coefficients.
class CanonicalEmbedding {
 public:
  explicit CanonicalEmbedding(std::size_t ring_degree) : n_(ring_degree) {
    require_param(is_power_of_two(n_) && n_ >= 4,
                  "CanonicalEmbedding: ring degree must be a power of two >= 4");
    log_n_ = log2_exact(n_);
    const std::size_t m = 2 * n_;
    const std::size_t slots = n_ / 2;

    roots_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const double angle = 2.0 * std::numbers::pi *
                           static_cast<double>(reverse_bits(i, log_n_)) /
                           static_cast<double>(m);
      roots_[i] = {std::cos(angle), std::sin(angle)};
    }

    slot_index_.resize(slots);
    conj_index_.resize(slots);
    std::size_t pos = 1;  // powers of the generator 3 modulo 2n
    for (std::size_t i = 0; i < slots; ++i) {
      const std::size_t idx1 = (pos - 1) >> 1;
      const std::size_t idx2 = (m - pos - 1) >> 1;
      slot_index_[i] = reverse_bits(idx1, log_n_);
      conj_index_[i] = reverse_bits(idx2, log_n_);
      pos = (pos * 3) % m;
    }
  }

  std::size_t ring_degree() const noexcept { return n_; }
  std::size_t slot_count() const noexcept { return n_ / 2; }

  // Real slot values -> unrounded real coefficients of the polynomial whose
  // canonical embedding is scale * values. values may be shorter than
  // slot_count(); missing slots are zero.
  std::vector<double> slots_to_coeffs(std::span<const double> values,
                                      double scale) const {
    require(values.size() <= slot_count(),
            "CanonicalEmbedding: more values than slots");
    std::vector<std::complex<double>> u(n_, {0.0, 0.0});
    for (std::size_t i = 0; i < values.size(); ++i) {
      u[slot_index_[i]] = {values[i], 0.0};
      u[conj_index_[i]] = {values[i], 0.0};  // conjugate of a real slot
    }
    // Gentleman-Sande pass with conjugate roots; coeffs_to_slots below runs
    // the mirrored Cooley-Tukey pass, so the pair composes to the identity.
    std::size_t tt = 1;
    for (std::size_t stage = 0; stage < log_n_; ++stage) {
      const std::size_t m = n_ >> stage;
      const std::size_t h = m >> 1;
      std::size_t k_start = 0;
      for (std::size_t j = 0; j < h; ++j) {
        const std::complex<double> s = std::conj(roots_[h + j]);
        for (std::size_t k = k_start; k < k_start + tt; ++k) {
          const std::complex<double> a = u[k];
          const std::complex<double> b = u[k + tt];
          u[k] = a + b;
          u[k + tt] = (a - b) * s;
        }
        k_start += 2 * tt;
      }
      tt *= 2;
    }
    const double factor = scale / static_cast<double>(n_);
    std::vector<double> coeffs(n_);
    for (std::size_t j = 0; j < n_; ++j) coeffs[j] = u[j].real() * factor;
    return coeffs;
  }

  // Real coefficients -> slot values divided by scale. Exact inverse of
  // slots_to_coeffs up to floating-point rounding.
  std::vector<double> coeffs_to_slots(std::span<const double> coeffs,
                                      double scale, std::size_t count) const {
    require(coeffs.size() == n_, "CanonicalEmbedding: bad coefficient count");
    require(count <= slot_count(), "CanonicalEmbedding: bad slot count");
    std::vector<std::complex<double>> u(n_);
    for (std::size_t j = 0; j < n_; ++j) u[j] = {coeffs[j], 0.0};
    for (std::size_t stage = log_n_; stage-- > 0;) {
      const std::size_t tt = std::size_t{1} << stage;
      const std::size_t m = n_ >> stage;
      const std::size_t h = m >> 1;
      std::size_t k_start = 0;
      for (std::size_t j = 0; j < h; ++j) {
        const std::complex<double> s = roots_[h + j];
        for (std::size_t k = k_start; k < k_start + tt; ++k) {
          const std::complex<double> a = u[k];
          const std::complex<double> b = u[k + tt] * s;
          u[k] = a + b;
          u[k + tt] = a - b;
        }
        k_start += 2 * tt;
      }
    }
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = u[slot_index_[i]].real() / scale;
    }
    return out;
  }

 private:
  std::size_t n_;
  std::size_t log_n_ = 0;
  std::vector<std::complex<double>> roots_;   // bit-reversed zeta powers
  std::vector<std::size_t> slot_index_;       // slot i -> array position
  std::vector<std::size_t> conj_index_;       // conjugate position
};

}  // namespace fedhybrid::he

#endif  // FEDHYBRID_HE_EMBEDDING_HPP_
