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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fedhybrid/model.hpp"
#include "fedhybrid/param_vector.hpp"
#include "fedhybrid/rng.hpp"
#include "oracle/reference.hpp"

namespace fh = fedhybrid;

namespace {

// Random dataset + model of the given shape, weights and samples ~ N(0,1).
struct RandomInstance {
  fh::RegressionModel model;
  fh::Dataset data;
};

RandomInstance make_instance(std::uint64_t seed, std::size_t nf,
                             std::size_t nt, std::size_t n) {
  fh::GaussianSampler gauss(seed);
  std::vector<double> w(fh::RegressionModel::weight_dim(nf, nt));
  for (double& v : w) v = gauss.standard();
  fh::Dataset data(nf, nt);
  std::vector<double> x(nf), y(nt);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x) v = gauss.standard();
    for (double& v : y) v = gauss.standard();
    data.add_sample(x, y);
  }
  return {fh::RegressionModel(fh::ParamVector(std::move(w)), nf, nt),
          std::move(data)};
}

}  // namespace

TEST_CASE("ParamVector validates and compares") {
  fh::ParamVector v(std::vector<double>{1.0, -2.0, 3.0});
  CHECK(v.dim() == 3);
  CHECK(v[1] == -2.0);
  CHECK(v.l2_norm() == Catch::Approx(std::sqrt(14.0)));
  CHECK(v == fh::ParamVector(std::vector<double>{1.0, -2.0, 3.0}));
  CHECK_FALSE(v == fh::ParamVector::zeros(3));
  CHECK_THROWS_AS(fh::ParamVector(std::vector<double>{1.0, NAN}),
                  fh::ContractError);
  CHECK_THROWS_AS(fh::ParamVector(std::vector<double>{INFINITY}),
                  fh::ContractError);
  CHECK(fh::ParamVector::zeros(4).l2_norm() == 0.0);
}

TEST_CASE("ParamVector arithmetic") {
  fh::ParamVector a(std::vector<double>{1.0, 2.0});
  fh::ParamVector b(std::vector<double>{0.5, -1.0});
  CHECK(fh::add(a, b) == fh::ParamVector(std::vector<double>{1.5, 1.0}));
  CHECK(fh::subtract(a, b) == fh::ParamVector(std::vector<double>{0.5, 3.0}));
  CHECK(fh::scale(a, -2.0) == fh::ParamVector(std::vector<double>{-2.0, -4.0}));
  CHECK_THROWS_AS(fh::add(a, fh::ParamVector::zeros(3)), fh::ContractError);
}

TEST_CASE("Dataset validates samples") {
  fh::Dataset d(2, 1);
  d.add_sample(std::vector<double>{1.0, 2.0}, std::vector<double>{3.0});
  CHECK(d.sample_count() == 1);
  CHECK(d.input(0)[1] == 2.0);
  CHECK(d.target(0)[0] == 3.0);
  CHECK_THROWS_AS(
      d.add_sample(std::vector<double>{1.0}, std::vector<double>{3.0}),
      fh::ContractError);
  CHECK_THROWS_AS(
      d.add_sample(std::vector<double>{1.0, NAN}, std::vector<double>{3.0}),
      fh::ContractError);
  CHECK_THROWS_AS(d.input(1), fh::ContractError);

  fh::Dataset other(2, 1);
  other.add_sample(std::vector<double>{4.0, 5.0}, std::vector<double>{6.0});
  d.append(other);
  CHECK(d.sample_count() == 2);
  CHECK(d.input(1)[0] == 4.0);
  CHECK_THROWS_AS(d.append(fh::Dataset(3, 1)), fh::ContractError);
}

TEST_CASE("predict computes A x + b") {
  // A = [[1,2],[3,4]], b = [1,-1], x = [1,1]  ->  y = [4, 6].
  fh::RegressionModel m(
      fh::ParamVector(std::vector<double>{1, 2, 3, 4, 1, -1}), 2, 2);
  const auto y = m.predict(std::vector<double>{1.0, 1.0});
  REQUIRE(y.size() == 2);
  CHECK(y[0] == 4.0);
  CHECK(y[1] == 6.0);
  CHECK(m.a(1, 0) == 3.0);
  CHECK(m.bias(1) == -1.0);
  CHECK_THROWS_AS(m.predict(std::vector<double>{1.0}), fh::ContractError);
}

TEST_CASE("weight_dim counts matrix plus bias") {
  CHECK(fh::RegressionModel::weight_dim(8, 3) == 27);
  CHECK(fh::RegressionModel::weight_dim(32, 8) == 264);
  CHECK_THROWS_AS(
      fh::RegressionModel(fh::ParamVector::zeros(5), 2, 2),
      fh::ContractError);
}

TEST_CASE("mse hand values") {
  CHECK(fh::mse({{1.0, 2.0}}, {{1.0, 2.0}}) == 0.0);
  // ((1-0)^2 + (2-0)^2) / 2 = 2.5
  CHECK(fh::mse({{1.0, 2.0}}, {{0.0, 0.0}}) == Catch::Approx(2.5));
  // Two rows, one coordinate each: ((3-1)^2 + (0-2)^2) / 2 = 4.
  CHECK(fh::mse({{3.0}, {0.0}}, {{1.0}, {2.0}}) == Catch::Approx(4.0));
  CHECK_THROWS_AS(fh::mse({}, {}), fh::ContractError);
  CHECK_THROWS_AS(fh::mse({{1.0}}, {{1.0}, {2.0}}), fh::ContractError);
  CHECK_THROWS_AS(fh::mse({{1.0}}, {{1.0, 2.0}}), fh::ContractError);
}

TEST_CASE("dataset_mse matches the sequence form") {
  auto inst = make_instance(7001, 3, 2, 9);
  std::vector<std::vector<double>> preds, targets;
  for (std::size_t i = 0; i < inst.data.sample_count(); ++i) {
    preds.push_back(inst.model.predict(inst.data.input(i)));
    const auto y = inst.data.target(i);
    targets.emplace_back(y.begin(), y.end());
  }
  CHECK(fh::dataset_mse(inst.model, inst.data) ==
        Catch::Approx(fh::mse(preds, targets)).epsilon(1e-14));
}

TEST_CASE("gradient matches central finite differences") {
  // 24 seeded shapes; relative error against the oracle below 1e-4 with an
  // absolute floor for near-zero coordinates.
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    std::mt19937_64 shape(fh::derive_seed(9100, seed));
    const std::size_t nf = 1 + shape() % 6;
    const std::size_t nt = 1 + shape() % 4;
    const std::size_t n = 1 + shape() % 12;
    auto inst = make_instance(fh::derive_seed(9200, seed), nf, nt, n);

    const auto g = fh::gradient(inst.model, inst.data);
    auto loss = [&](const std::vector<double>& w) {
      fh::RegressionModel m(fh::ParamVector(w), nf, nt);
      return fh::dataset_mse(m, inst.data);
    };
    const auto g_ref = oracle::finite_diff_gradient(
        loss, inst.model.weights().values(), 1e-5);
    REQUIRE(g.dim() == g_ref.size());
    for (std::size_t i = 0; i < g_ref.size(); ++i) {
      const double err = std::fabs(g[i] - g_ref[i]);
      const double tol = 1e-4 * std::max(std::fabs(g_ref[i]), 1e-3);
      INFO("seed " << seed << " coord " << i << " got " << g[i] << " want "
                   << g_ref[i]);
      CHECK(err <= tol);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("gradient vanishes at the exact optimum") {
  // Data generated exactly by the model -> zero residuals -> zero gradient.
  const std::size_t nf = 4, nt = 3;
  auto inst = make_instance(5150, nf, nt, 20);
  fh::Dataset realizable(nf, nt);
  for (std::size_t i = 0; i < inst.data.sample_count(); ++i) {
    const auto x = inst.data.input(i);
    realizable.add_sample(x, inst.model.predict(x));
  }
  const auto g = fh::gradient(inst.model, realizable);
  for (std::size_t i = 0; i < g.dim(); ++i) CHECK(std::fabs(g[i]) < 1e-12);
  CHECK(fh::dataset_mse(inst.model, realizable) < 1e-24);
}

TEST_CASE("gradient rejects bad shapes") {
  auto inst = make_instance(1, 2, 2, 3);
  CHECK_THROWS_AS(fh::gradient(inst.model, fh::Dataset(2, 2)),
                  fh::ContractError);
  CHECK_THROWS_AS(fh::gradient(inst.model, fh::Dataset(3, 2)),
                  fh::ContractError);
}

TEST_CASE("sgd_step is w minus eta g") {
  fh::ParamVector w(std::vector<double>{1.0, 2.0, 3.0});
  fh::ParamVector g(std::vector<double>{10.0, 0.0, -10.0});
  const auto w2 = fh::sgd_step(w, g, 0.1);
  CHECK(w2 == fh::ParamVector(std::vector<double>{0.0, 2.0, 4.0}));
  CHECK_THROWS_AS(fh::sgd_step(w, g, 0.0), fh::ContractError);
  CHECK_THROWS_AS(fh::sgd_step(w, g, -1.0), fh::ContractError);
  CHECK_THROWS_AS(fh::sgd_step(w, fh::ParamVector::zeros(2), 0.1),
                  fh::ContractError);
}

TEST_CASE("mean_target_bias_init reaches the variance floor") {
  auto inst = make_instance(333, 5, 2, 40);
  const auto init = fh::mean_target_bias_init(inst.model, inst.data);
  // Matrix part is zero, bias is the target mean.
  for (std::size_t t = 0; t < 2; ++t) {
    for (std::size_t f = 0; f < 5; ++f) CHECK(init.a(t, f) == 0.0);
    double mean = 0.0;
    for (std::size_t i = 0; i < inst.data.sample_count(); ++i) {
      mean += inst.data.target(i)[t];
    }
    mean /= static_cast<double>(inst.data.sample_count());
    CHECK(init.bias(t) == Catch::Approx(mean).epsilon(1e-14));
  }
  // Training MSE equals the mean per-coordinate population variance.
  double var = 0.0;
  for (std::size_t t = 0; t < 2; ++t) {
    for (std::size_t i = 0; i < inst.data.sample_count(); ++i) {
      const double r = inst.data.target(i)[t] - init.bias(t);
      var += r * r;
    }
  }
  var /= static_cast<double>(inst.data.sample_count() * 2);
  CHECK(fh::dataset_mse(init, inst.data) == Catch::Approx(var).epsilon(1e-12));
}

TEST_CASE("gradient descent fits a noiseless linear map") {
  // Sanity: with enough plain GD steps the training MSE collapses.
  const std::size_t nf = 3, nt = 2;
  auto truth = make_instance(777, nf, nt, 0).model;
  fh::GaussianSampler gauss(778);
  fh::Dataset data(nf, nt);
  std::vector<double> x(nf);
  for (std::size_t i = 0; i < 50; ++i) {
    for (double& v : x) v = gauss.standard();
    data.add_sample(x, truth.predict(x));
  }
  fh::RegressionModel m = fh::mean_target_bias_init(
      fh::RegressionModel(nf, nt), data);
  const double before = fh::dataset_mse(m, data);
  for (int step = 0; step < 400; ++step) {
    m = m.with_weights(fh::sgd_step(m.weights(), fh::gradient(m, data), 0.1));
  }
  const double after = fh::dataset_mse(m, data);
  CHECK(after < before * 1e-6);
}
