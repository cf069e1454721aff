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

#ifndef FEDHYBRID_PARAM_VECTOR_HPP_
#define FEDHYBRID_PARAM_VECTOR_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedhybrid/errors.hpp"

namespace fedhybrid {

// Flat model-parameter vector. Immutable after construction; arithmetic is
// provided by pure free functions. Entries are always finite.
class ParamVector {
 public:
  ParamVector() = default;

  explicit ParamVector(std::size_t dim) : values_(dim, 0.0) {}

  explicit ParamVector(std::vector<double> values)
      : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw ContractError("ParamVector: non-finite entry at index " +
                            std::to_string(i));
      }
    }
  }

  static ParamVector zeros(std::size_t dim) { return ParamVector(dim); }

  std::size_t dim() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const {
    require(i < values_.size(), "ParamVector: index out of range");
    return values_[i];
  }

  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const double> span() const noexcept {
    return {values_.data(), values_.size()};
  }

  double l2_norm() const {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
  }

  friend bool operator==(const ParamVector& a, const ParamVector& b) {
    return a.values_ == b.values_;
  }

 private:
  std::vector<double> values_;
};

inline void check_same_dim(const ParamVector& a, const ParamVector& b,
                           const char* op) {
  if (a.dim() != b.dim()) {
    throw ContractError(std::string(op) + ": dimension mismatch (" +
                        std::to_string(a.dim()) + " vs " +
                        std::to_string(b.dim()) + ")");
  }
}

inline ParamVector add(const ParamVector& a, const ParamVector& b) {
  check_same_dim(a, b, "add");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return ParamVector(std::move(out));
}

inline ParamVector subtract(const ParamVector& a, const ParamVector& b) {
  check_same_dim(a, b, "subtract");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] - b.values()[i];
  return ParamVector(std::move(out));
}

inline ParamVector scale(const ParamVector& a, double factor) {
  require(std::isfinite(factor), "scale: factor must be finite");
  std::vector<double> out(a.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * factor;
  return ParamVector(std::move(out));
}

}  // namespace fedhybrid

#endif  // FEDHYBRID_PARAM_VECTOR_HPP_
