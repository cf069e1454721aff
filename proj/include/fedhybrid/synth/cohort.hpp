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

#ifndef FEDHYBRID_SYNTH_COHORT_HPP_
#define FEDHYBRID_SYNTH_COHORT_HPP_

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/fl/modes.hpp"
#include "fedhybrid/model.hpp"
#include "fedhybrid/rng.hpp"

namespace fedhybrid::synth {

// Synthetic spatial-expression cohort: every client holds a block of
// consecutive patients, every patient contributes a fixed number of spots.
// A spot's targets follow y = A* x + b* + shift_patient + noise with
// standard-normal features. A* entries are scaled by 1/sqrt(n_features) so
// target magnitudes stay O(1) regardless of the feature width.
struct SynthSpec {
  std::size_t n_features = 32;
  std::size_t n_targets = 8;
  std::size_t patients_per_client = 3;
  std::size_t spots_per_patient = 100;
  double noise_stddev = 0.25;
  double heterogeneity = 0.3;  // stddev of the per-patient target shift
  std::uint64_t master_seed = 1;
};

struct Patient {
  int id = 0;  // global patient index, consecutive across clients
  Dataset spots;
};

struct CohortClient {
  int id = 0;
  double capacity = 0.0;
  std::vector<Patient> patients;
};

struct Cohort {
  SynthSpec spec;
  std::size_t n_clients = 0;
  std::vector<CohortClient> clients;
  ParamVector true_map;  // flat [A* row-major | b*], for diagnostics only
};

// Seed-stream labels under the cohort master seed.
inline constexpr std::uint64_t kStreamTruth = 100;
inline constexpr std::uint64_t kStreamCapacity = 101;
inline constexpr std::uint64_t kStreamShift = 200;
inline constexpr std::uint64_t kStreamSpots = 201;
inline constexpr std::uint64_t kStreamSplit = 300;

inline void validate_spec(const SynthSpec& spec) {
  require_param(spec.n_features > 0 && spec.n_targets > 0,
                "SynthSpec: feature and target widths must be positive");
  require_param(spec.patients_per_client > 0,
                "SynthSpec: patients_per_client must be positive");
  require_param(spec.spots_per_patient >= 2,
                "SynthSpec: spots_per_patient must be at least 2");
  require_param(spec.noise_stddev >= 0.0 && std::isfinite(spec.noise_stddev),
                "SynthSpec: noise_stddev must be non-negative");
  require_param(spec.heterogeneity >= 0.0 && std::isfinite(spec.heterogeneity),
                "SynthSpec: heterogeneity must be non-negative");
}

inline Cohort generate_cohort(const SynthSpec& spec, std::size_t n_clients) {
  validate_spec(spec);
  require(n_clients >= 1, "generate_cohort: need at least one client");

  const std::size_t nf = spec.n_features;
  const std::size_t nt = spec.n_targets;

  // Ground-truth map, drawn once per cohort.
  GaussianSampler truth(derive_seed(spec.master_seed, kStreamTruth));
  std::vector<double> a_star(nt * nf);
  const double a_scale = 1.0 / std::sqrt(static_cast<double>(nf));
  for (auto& v : a_star) v = truth.standard() * a_scale;
  std::vector<double> b_star(nt);
  for (auto& v : b_star) v = truth.standard();

  std::mt19937_64 capacity_engine(
      derive_seed(spec.master_seed, kStreamCapacity));

  Cohort cohort;
  cohort.spec = spec;
  cohort.n_clients = n_clients;
  int patient_id = 0;
  for (std::size_t c = 0; c < n_clients; ++c) {
    CohortClient client;
    client.id = static_cast<int>(c);
    client.capacity = uniform_unit(capacity_engine);
    for (std::size_t p = 0; p < spec.patients_per_client; ++p, ++patient_id) {
      Patient patient{patient_id, Dataset(nf, nt)};

      GaussianSampler shift_gauss(derive_seed(
          spec.master_seed, kStreamShift, static_cast<std::uint64_t>(patient_id)));
      std::vector<double> shift(nt);
      for (auto& v : shift) v = shift_gauss.sample(0.0, spec.heterogeneity);

      GaussianSampler spot_gauss(derive_seed(
          spec.master_seed, kStreamSpots, static_cast<std::uint64_t>(patient_id)));
      std::vector<double> x(nf);
      std::vector<double> y(nt);
      for (std::size_t s = 0; s < spec.spots_per_patient; ++s) {
        for (auto& v : x) v = spot_gauss.standard();
        for (std::size_t t = 0; t < nt; ++t) {
          double acc = b_star[t] + shift[t];
          const double* row = a_star.data() + t * nf;
          for (std::size_t f = 0; f < nf; ++f) acc += row[f] * x[f];
          y[t] = acc + spot_gauss.sample(0.0, spec.noise_stddev);
        }
        patient.spots.add_sample(x, y);
      }
      client.patients.push_back(std::move(patient));
    }
    cohort.clients.push_back(std::move(client));
  }

  std::vector<double> flat = a_star;
  flat.insert(flat.end(), b_star.begin(), b_star.end());
  cohort.true_map = ParamVector(std::move(flat));
  return cohort;
}

struct ClientShard {
  int id = 0;
  double capacity = 0.0;
  Dataset train;
};

struct SplitCohort {
  std::vector<ClientShard> clients;
  Dataset test;
};

// Per-patient holdout: a seeded permutation of each patient's spot indices
// sends the first round(test_fraction * spots) spots to the pooled test set
// and leaves the rest in the owning client's training shard. Row order stays
// ascending in the original spot index on both sides.
inline SplitCohort holdout_split(const Cohort& cohort, double test_fraction) {
  require(test_fraction > 0.0 && test_fraction < 1.0,
          "holdout_split: test_fraction must lie in (0, 1)");
  const std::size_t spots = cohort.spec.spots_per_patient;
  const std::size_t n_test = fl::round_half_to_even(
      test_fraction * static_cast<double>(spots));
  require(n_test > 0 && n_test < spots,
          "holdout_split: test_fraction leaves an empty train or test side");

  const std::size_t nf = cohort.spec.n_features;
  const std::size_t nt = cohort.spec.n_targets;
  SplitCohort split{{}, Dataset(nf, nt)};
  for (const auto& client : cohort.clients) {
    ClientShard shard{client.id, client.capacity, Dataset(nf, nt)};
    for (const auto& patient : client.patients) {
      std::vector<std::size_t> order(spots);
      for (std::size_t i = 0; i < spots; ++i) order[i] = i;
      std::mt19937_64 engine(
          derive_seed(cohort.spec.master_seed, kStreamSplit,
                      static_cast<std::uint64_t>(patient.id)));
      for (std::size_t i = spots; i > 1; --i) {
        std::swap(order[i - 1], order[uniform_below(engine, i)]);
      }
      std::vector<std::size_t> test_idx(order.begin(), order.begin() + n_test);
      std::vector<std::size_t> train_idx(order.begin() + n_test, order.end());
      std::sort(test_idx.begin(), test_idx.end());
      std::sort(train_idx.begin(), train_idx.end());
      for (std::size_t i : test_idx) {
        split.test.add_sample(patient.spots.input(i), patient.spots.target(i));
      }
      for (std::size_t i : train_idx) {
        shard.train.add_sample(patient.spots.input(i), patient.spots.target(i));
      }
    }
    split.clients.push_back(std::move(shard));
  }
  return split;
}

// --- dataset dump / load -----------------------------------------------------
//
// Text format: one header line `n_features=<u>,n_targets=<u>,samples=<u>,
// seed=<u>`, then one comma-separated row per sample (features, then
// targets) printed with %.17g so values survive the round trip exactly.

inline void dump_dataset(const Dataset& data, std::uint64_t seed,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("dump_dataset: cannot open '" + path + "'");
  out << "n_features=" << data.n_features() << ",n_targets=" << data.n_targets()
      << ",samples=" << data.sample_count() << ",seed=" << seed << "\n";
  char buf[40];
  for (std::size_t i = 0; i < data.sample_count(); ++i) {
    bool first = true;
    const auto row = [&](std::span<const double> values) {
      for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!first) out << ',';
        out << buf;
        first = false;
      }
    };
    row(data.input(i));
    row(data.target(i));
    out << "\n";
  }
  if (!out.good()) throw IoError("dump_dataset: write failed for '" + path + "'");
}

struct LoadedDataset {
  Dataset data;
  std::uint64_t seed = 0;
};

inline LoadedDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_dataset: cannot open '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) {
    throw IoError("load_dataset: missing header line");
  }
  std::size_t nf = 0, nt = 0, samples = 0;
  std::uint64_t seed = 0;
  if (std::sscanf(header.c_str(),
                  "n_features=%zu,n_targets=%zu,samples=%zu,seed=%" SCNu64,
                  &nf, &nt, &samples, &seed) != 4) {
    throw IoError("load_dataset: malformed header '" + header + "'");
  }
  if (nf == 0 || nt == 0) {
    throw IoError("load_dataset: header declares empty dimensions");
  }

  LoadedDataset loaded{Dataset(nf, nt), seed};
  std::string line;
  std::vector<double> x(nf);
  std::vector<double> y(nt);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t j = 0; j < nf + nt; ++j) {
      if (!std::getline(ss, cell, ',')) {
        throw IoError("load_dataset: short row " + std::to_string(rows));
      }
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw IoError("load_dataset: bad number '" + cell + "'");
      }
      if (used != cell.size()) {
        throw IoError("load_dataset: bad number '" + cell + "'");
      }
      (j < nf ? x[j] : y[j - nf]) = value;
    }
    if (std::getline(ss, cell, ',')) {
      throw IoError("load_dataset: long row " + std::to_string(rows));
    }
    loaded.data.add_sample(x, y);
    ++rows;
  }
  if (rows != samples) {
    throw IoError("load_dataset: header declares " + std::to_string(samples) +
                  " samples but file has " + std::to_string(rows));
  }
  return loaded;
}

}  // namespace fedhybrid::synth

#endif  // FEDHYBRID_SYNTH_COHORT_HPP_
