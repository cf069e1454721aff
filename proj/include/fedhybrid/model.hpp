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

#ifndef FEDHYBRID_MODEL_HPP_
#define FEDHYBRID_MODEL_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/param_vector.hpp"

namespace fedhybrid {

// Row-major sample store: inputs are n_features wide, targets n_targets wide.
class Dataset {
 public:
  Dataset(std::size_t n_features, std::size_t n_targets)
      : n_features_(n_features), n_targets_(n_targets) {
    require(n_features_ > 0 && n_targets_ > 0,
            "Dataset: feature and target widths must be positive");
  }

  void add_sample(std::span<const double> x, std::span<const double> y) {
    require(x.size() == n_features_, "Dataset::add_sample: bad input width");
    require(y.size() == n_targets_, "Dataset::add_sample: bad target width");
    for (double v : x) require(std::isfinite(v), "Dataset: non-finite input");
    for (double v : y) require(std::isfinite(v), "Dataset: non-finite target");
    inputs_.insert(inputs_.end(), x.begin(), x.end());
    targets_.insert(targets_.end(), y.begin(), y.end());
    ++count_;
  }

  void append(const Dataset& other) {
    require(other.n_features_ == n_features_ && other.n_targets_ == n_targets_,
            "Dataset::append: shape mismatch");
    inputs_.insert(inputs_.end(), other.inputs_.begin(), other.inputs_.end());
    targets_.insert(targets_.end(), other.targets_.begin(),
                    other.targets_.end());
    count_ += other.count_;
  }

  std::size_t n_features() const noexcept { return n_features_; }
  std::size_t n_targets() const noexcept { return n_targets_; }
  std::size_t sample_count() const noexcept { return count_; }

  std::span<const double> input(std::size_t i) const {
    require(i < count_, "Dataset::input: index out of range");
    return {inputs_.data() + i * n_features_, n_features_};
  }

  std::span<const double> target(std::size_t i) const {
    require(i < count_, "Dataset::target: index out of range");
    return {targets_.data() + i * n_targets_, n_targets_};
  }

 private:
  std::size_t n_features_;
  std::size_t n_targets_;
  std::size_t count_ = 0;
  std::vector<double> inputs_;
  std::vector<double> targets_;
};

// Multi-output linear model y = A x + b. Weights are stored flat: the
// n_targets x n_features matrix A in row-major order, then the bias b.
class RegressionModel {
 public:
  static std::size_t weight_dim(std::size_t n_features,
                                std::size_t n_targets) {
    return n_targets * n_features + n_targets;
  }

  RegressionModel(std::size_t n_features, std::size_t n_targets)
      : RegressionModel(ParamVector(weight_dim(n_features, n_targets)),
                        n_features, n_targets) {}

  RegressionModel(ParamVector weights, std::size_t n_features,
                  std::size_t n_targets)
      : weights_(std::move(weights)),
        n_features_(n_features),
        n_targets_(n_targets) {
    require(n_features_ > 0 && n_targets_ > 0,
            "RegressionModel: widths must be positive");
    require(weights_.dim() == weight_dim(n_features_, n_targets_),
            "RegressionModel: weight vector has wrong dimension");
  }

  std::size_t n_features() const noexcept { return n_features_; }
  std::size_t n_targets() const noexcept { return n_targets_; }
  const ParamVector& weights() const noexcept { return weights_; }

  double a(std::size_t t, std::size_t f) const {
    return weights_[t * n_features_ + f];
  }

  double bias(std::size_t t) const {
    return weights_[n_targets_ * n_features_ + t];
  }

  std::vector<double> predict(std::span<const double> x) const {
    require(x.size() == n_features_, "predict: bad input width");
    std::vector<double> y(n_targets_);
    const auto& w = weights_.values();
    for (std::size_t t = 0; t < n_targets_; ++t) {
      double acc = w[n_targets_ * n_features_ + t];
      const double* row = w.data() + t * n_features_;
      for (std::size_t f = 0; f < n_features_; ++f) acc += row[f] * x[f];
      y[t] = acc;
    }
    return y;
  }

  RegressionModel with_weights(ParamVector w) const {
    return RegressionModel(std::move(w), n_features_, n_targets_);
  }

 private:
  ParamVector weights_;
  std::size_t n_features_;
  std::size_t n_targets_;
};

// Mean squared error over aligned prediction/target sequences, averaged over
// both samples and target coordinates.
inline double mse(const std::vector<std::vector<double>>& predictions,
                  const std::vector<std::vector<double>>& targets) {
  require(predictions.size() == targets.size(), "mse: sequence length mismatch");
  require(!predictions.empty(), "mse: empty input");
  double sum = 0.0;
  std::size_t terms = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    require(predictions[i].size() == targets[i].size() &&
                !predictions[i].empty(),
            "mse: row width mismatch");
    for (std::size_t j = 0; j < predictions[i].size(); ++j) {
      const double r = predictions[i][j] - targets[i][j];
      sum += r * r;
    }
    terms += predictions[i].size();
  }
  return sum / static_cast<double>(terms);
}

// MSE of a model over a dataset.
inline double dataset_mse(const RegressionModel& model, const Dataset& data) {
  require(data.sample_count() > 0, "dataset_mse: empty dataset");
  require(data.n_features() == model.n_features() &&
              data.n_targets() == model.n_targets(),
          "dataset_mse: dataset/model shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.sample_count(); ++i) {
    const auto y_hat = model.predict(data.input(i));
    const auto y = data.target(i);
    for (std::size_t t = 0; t < y_hat.size(); ++t) {
      const double r = y_hat[t] - y[t];
      sum += r * r;
    }
  }
  return sum /
         static_cast<double>(data.sample_count() * data.n_targets());
}

// Exact gradient of dataset_mse with respect to the flat weights:
//   d/dA[t,f] = (2 / (n * n_targets)) * sum_i residual_i[t] * x_i[f]
//   d/db[t]   = (2 / (n * n_targets)) * sum_i residual_i[t]
// where residual = prediction - target.
inline ParamVector gradient(const RegressionModel& model,
                            const Dataset& batch) {
  require(batch.sample_count() > 0, "gradient: empty batch");
  require(batch.n_features() == model.n_features() &&
              batch.n_targets() == model.n_targets(),
          "gradient: batch/model shape mismatch");
  const std::size_t nf = model.n_features();
  const std::size_t nt = model.n_targets();
  std::vector<double> grad(RegressionModel::weight_dim(nf, nt), 0.0);
  for (std::size_t i = 0; i < batch.sample_count(); ++i) {
    const auto x = batch.input(i);
    const auto y = batch.target(i);
    const auto y_hat = model.predict(x);
    for (std::size_t t = 0; t < nt; ++t) {
      const double r = y_hat[t] - y[t];
      double* row = grad.data() + t * nf;
      for (std::size_t f = 0; f < nf; ++f) row[f] += r * x[f];
      grad[nt * nf + t] += r;
    }
  }
  const double factor =
      2.0 / static_cast<double>(batch.sample_count() * nt);
  for (double& g : grad) g *= factor;
  return ParamVector(std::move(grad));
}

// One plain gradient step: w - eta * g.
inline ParamVector sgd_step(const ParamVector& weights,
                            const ParamVector& grad, double eta) {
  check_same_dim(weights, grad, "sgd_step");
  require(std::isfinite(eta) && eta > 0.0, "sgd_step: eta must be positive");
  std::vector<double> out(weights.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = weights.values()[i] - eta * grad.values()[i];
  }
  return ParamVector(std::move(out));
}

// Zero matrix, bias = per-target mean of the training targets. With this
// start the training-set MSE equals the per-coordinate target variance.
inline RegressionModel mean_target_bias_init(const RegressionModel& model,
                                             const Dataset& train) {
  require(train.sample_count() > 0, "mean_target_bias_init: empty dataset");
  require(train.n_features() == model.n_features() &&
              train.n_targets() == model.n_targets(),
          "mean_target_bias_init: dataset/model shape mismatch");
  const std::size_t nf = model.n_features();
  const std::size_t nt = model.n_targets();
  std::vector<double> w(RegressionModel::weight_dim(nf, nt), 0.0);
  for (std::size_t i = 0; i < train.sample_count(); ++i) {
    const auto y = train.target(i);
    for (std::size_t t = 0; t < nt; ++t) w[nt * nf + t] += y[t];
  }
  for (std::size_t t = 0; t < nt; ++t) {
    w[nt * nf + t] /= static_cast<double>(train.sample_count());
  }
  return model.with_weights(ParamVector(std::move(w)));
}

}  // namespace fedhybrid

#endif  // FEDHYBRID_MODEL_HPP_
