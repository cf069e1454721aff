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

#ifndef FEDHYBRID_EXPERIMENT_RUNNER_HPP_
#define FEDHYBRID_EXPERIMENT_RUNNER_HPP_

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/experiment/config.hpp"
#include "fedhybrid/fl/protocol.hpp"
#include "fedhybrid/he/backend.hpp"
#include "fedhybrid/synth/cohort.hpp"

namespace fedhybrid::experiment {

// One point of the sweep grid. For non-hybrid modes the alpha axis
// collapses (the ratio is implied by the mode) and for modes without DP
// clients the epsilon axis collapses; both are still echoed in the output.
struct SweepCell {
  fl::RunMode mode = fl::RunMode::kHybrid;
  std::size_t n_clients = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
};

inline double implied_alpha(fl::RunMode mode) {
  switch (mode) {
    case fl::RunMode::kHeOnly:
      return 1.0;
    case fl::RunMode::kPlain:
    case fl::RunMode::kDpOnly:
      return 0.0;
    case fl::RunMode::kHybrid:
      break;
  }
  throw ContractError("implied_alpha: only defined for non-hybrid modes");
}

inline bool mode_uses_dp(fl::RunMode mode) {
  return mode == fl::RunMode::kDpOnly || mode == fl::RunMode::kHybrid;
}

inline bool mode_uses_he(fl::RunMode mode) {
  return mode == fl::RunMode::kHeOnly || mode == fl::RunMode::kHybrid;
}

// Cell order is the nesting mode > n_clients > alpha > epsilon; output rows
// follow it deterministically.
inline std::vector<SweepCell> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<SweepCell> cells;
  for (fl::RunMode mode : cfg.modes) {
    const bool hybrid = mode == fl::RunMode::kHybrid;
    const std::vector<double> alphas =
        hybrid ? cfg.alphas : std::vector<double>{implied_alpha(mode)};
    const std::vector<double> epsilons =
        mode_uses_dp(mode) ? cfg.epsilons
                           : std::vector<double>{cfg.epsilons.front()};
    for (std::size_t n : cfg.n_clients) {
      for (double alpha : alphas) {
        for (double epsilon : epsilons) {
          cells.push_back({mode, n, alpha, epsilon});
        }
      }
    }
  }
  return cells;
}

struct ResultRow {
  std::string mode;
  std::size_t n_clients = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::size_t round = 0;
  double mse = 0.0;
  fl::PhaseTimes times;
};

// Seed-stream labels under a run seed.
inline constexpr std::uint64_t kStreamCohort = 11;
inline constexpr std::uint64_t kStreamKeygen = 12;
inline constexpr std::uint64_t kStreamClient = 13;

inline he::HeParams he_params_for(const ExperimentConfig& cfg) {
  return cfg.he_params == "paper" ? he::paper_params() : he::desk_params();
}

// One (cell, seed) run: fresh cohort, fresh keys, full training.
inline std::vector<ResultRow> run_single(const ExperimentConfig& cfg,
                                         const SweepCell& cell,
                                         std::uint64_t seed,
                                         const he::HeParams& he_params) {
  synth::SynthSpec spec = cfg.synth;
  if (spec.master_seed == 0) {
    spec.master_seed = derive_seed(seed, kStreamCohort);
  }
  const synth::Cohort cohort = synth::generate_cohort(spec, cell.n_clients);
  synth::SplitCohort split = synth::holdout_split(cohort, cfg.holdout_fraction);

  auto backend = std::make_shared<he::CkksLiteBackend>(
      he_params, derive_seed(seed, kStreamKeygen));

  std::optional<dp::PrivacyParams> dp_params;
  if (mode_uses_dp(cell.mode)) {
    dp_params = dp::PrivacyParams::calibrated(cell.epsilon, cfg.delta,
                                              cfg.clip_norm);
  }

  std::vector<fl::ClientState> clients;
  clients.reserve(split.clients.size());
  for (auto& shard : split.clients) {
    fl::ClientState client{shard.id, std::move(shard.train), shard.capacity,
                           derive_seed(seed, kStreamClient,
                                       static_cast<std::uint64_t>(shard.id)),
                           fl::ClientMode::kDp, dp_params};
    clients.push_back(std::move(client));
  }

  fl::TrainingConfig train_cfg;
  train_cfg.rounds = cfg.rounds;
  train_cfg.round.run_mode = cell.mode;
  train_cfg.round.policy = fl::FixedRatio{cell.alpha};
  train_cfg.round.train =
      fl::LocalTrainConfig{cfg.eta, cfg.local_epochs, cfg.batch_size};
  train_cfg.round.timed = cfg.timing == TimingMode::kWall;

  const fl::TrainingResult result = fl::run_training(
      std::move(clients), std::move(split.test), train_cfg, backend);

  std::vector<ResultRow> rows;
  rows.reserve(result.records.size());
  for (const auto& record : result.records) {
    rows.push_back({std::string(fl::run_mode_name(cell.mode)), cell.n_clients,
                    cell.alpha, cell.epsilon, seed, record.round,
                    record.global_mse, record.times});
  }
  return rows;
}

// --- CSV ----------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "mode,n_clients,alpha,epsilon,seed,round,mse,t_total_ms,t_broadcast_ms,"
    "t_local_ms,t_protect_ms,t_agg_he_ms,t_decrypt_ms,t_agg_dp_ms,"
    "t_update_ms,t_test_ms";

inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string format_row(const ResultRow& r) {
  std::string out;
  out.reserve(160);
  out += r.mode;
  out += ',';
  out += std::to_string(r.n_clients);
  out += ',';
  out += format_float(r.alpha);
  out += ',';
  out += format_float(r.epsilon);
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += std::to_string(r.round);
  out += ',';
  out += format_float(r.mse);
  for (double t : {r.times.total_ms, r.times.broadcast_ms, r.times.local_ms,
                   r.times.protect_ms, r.times.agg_he_ms, r.times.decrypt_ms,
                   r.times.agg_dp_ms, r.times.update_ms, r.times.test_ms}) {
    out += ',';
    out += format_float(t);
  }
  return out;
}

inline std::string format_csv(std::span<const ResultRow> rows) {
  std::string out{kCsvHeader};
  out += '\n';
  for (const auto& r : rows) {
    out += format_row(r);
    out += '\n';
  }
  return out;
}

inline void emit_csv(std::span<const ResultRow> rows,
                     const std::string& path) {
  require(!rows.empty(), "emit_csv: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit_csv: cannot open '" + path + "'");
  out << format_csv(rows);
  if (!out.good()) throw IoError("emit_csv: write failed for '" + path + "'");
}

// --- summaries ------------------------------------------------------------------

struct SummaryRow {
  std::string mode;
  std::size_t n_clients = 0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::size_t n_seeds = 0;
  double final_mse_mean = 0.0;
  double final_mse_std = 0.0;   // sample standard deviation
  double total_time_mean_ms = 0.0;
  double total_time_std_ms = 0.0;
};

inline constexpr std::string_view kSummaryHeader =
    "mode,n_clients,alpha,epsilon,n_seeds,final_mse_mean,final_mse_std,"
    "total_time_mean_ms,total_time_std_ms";

inline void mean_std(std::span<const double> values, double& mean,
                     double& std_dev) {
  require(!values.empty(), "mean_std: empty input");
  double sum = 0.0;
  for (double v : values) sum += v;
  mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) {
    std_dev = 0.0;
    return;
  }
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  std_dev = std::sqrt(sq / static_cast<double>(values.size() - 1));
}

// Per-cell mean/std over seeds of the final-round MSE and of the whole-run
// wall time (sum of per-round totals). Rows must be grouped by cell and
// seed, which run_experiment guarantees.
inline std::vector<SummaryRow> compute_summaries(
    std::span<const ResultRow> rows, const ExperimentConfig& cfg) {
  std::vector<SummaryRow> summaries;
  const std::size_t rows_per_run = cfg.rounds;
  require(rows.size() % rows_per_run == 0,
          "compute_summaries: row count is not a whole number of runs");
  const std::size_t n_runs = rows.size() / rows_per_run;

  std::size_t r = 0;
  while (r < n_runs) {
    const ResultRow& head = rows[r * rows_per_run];
    std::vector<double> final_mse;
    std::vector<double> run_time;
    std::size_t s = r;
    for (; s < n_runs; ++s) {
      const std::size_t base = s * rows_per_run;
      const ResultRow& row0 = rows[base];
      if (row0.mode != head.mode || row0.n_clients != head.n_clients ||
          row0.alpha != head.alpha || row0.epsilon != head.epsilon) {
        break;
      }
      double total = 0.0;
      for (std::size_t i = 0; i < rows_per_run; ++i) {
        total += rows[base + i].times.total_ms;
      }
      final_mse.push_back(rows[base + rows_per_run - 1].mse);
      run_time.push_back(total);
    }
    SummaryRow summary{head.mode, head.n_clients, head.alpha,
                       head.epsilon, final_mse.size(), 0, 0, 0, 0};
    mean_std(final_mse, summary.final_mse_mean, summary.final_mse_std);
    mean_std(run_time, summary.total_time_mean_ms, summary.total_time_std_ms);
    summaries.push_back(std::move(summary));
    r = s;
  }
  return summaries;
}

inline std::string format_summary_csv(std::span<const SummaryRow> rows) {
  std::string out{kSummaryHeader};
  out += '\n';
  for (const auto& r : rows) {
    out += r.mode;
    out += ',';
    out += std::to_string(r.n_clients);
    out += ',';
    out += format_float(r.alpha);
    out += ',';
    out += format_float(r.epsilon);
    out += ',';
    out += std::to_string(r.n_seeds);
    for (double v : {r.final_mse_mean, r.final_mse_std, r.total_time_mean_ms,
                     r.total_time_std_ms}) {
      out += ',';
      out += format_float(v);
    }
    out += '\n';
  }
  return out;
}

inline void emit_summary_csv(std::span<const SummaryRow> rows,
                             const std::string& path) {
  require(!rows.empty(), "emit_summary_csv: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit_summary_csv: cannot open '" + path + "'");
  out << format_summary_csv(rows);
  if (!out.good()) {
    throw IoError("emit_summary_csv: write failed for '" + path + "'");
  }
}

// --- experiment driver ------------------------------------------------------------

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summaries;
  std::vector<std::string> failures;  // one message per failed run

  bool ok() const noexcept { return failures.empty(); }
};

// FEDHYBRID_THREADS caps the worker count regardless of the config.
inline std::size_t effective_threads(const ExperimentConfig& cfg) {
  std::size_t threads = cfg.threads;
  if (const char* env = std::getenv("FEDHYBRID_THREADS")) {
    try {
      const std::size_t cap = parse_count(env, "FEDHYBRID_THREADS");
      if (cap >= 1) threads = std::min(threads, cap);
    } catch (const ConfigError&) {
      // Unparseable cap: ignore rather than kill a long run.
    }
  }
  return std::max<std::size_t>(threads, 1);
}

// Runs the whole sweep. Jobs are all (cell, seed) pairs in deterministic
// order; with threads > 1 the jobs run concurrently but rows are still
// delivered to `on_row` and returned in that same order. A failed run is
// recorded (and skipped in the output) rather than aborting the sweep.
inline ExperimentResult run_experiment(
    const ExperimentConfig& cfg,
    const std::function<void(const ResultRow&)>& on_row = {}) {
  validate_config(cfg);
  const std::vector<SweepCell> cells = enumerate_cells(cfg);
  const he::HeParams he_params = he_params_for(cfg);

  struct Job {
    SweepCell cell;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  jobs.reserve(cells.size() * cfg.seeds.size());
  for (const auto& cell : cells) {
    for (std::uint64_t seed : cfg.seeds) {
      jobs.push_back({cell, seed});
    }
  }

  std::vector<std::vector<ResultRow>> job_rows(jobs.size());
  std::vector<std::string> job_errors(jobs.size());

  const std::size_t workers = std::min(effective_threads(cfg), jobs.size());
  const auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    try {
      job_rows[j] = run_single(cfg, job.cell, job.seed, he_params);
    } catch (const std::exception& e) {
      job_errors[j] = std::string(fl::run_mode_name(job.cell.mode)) +
                      " n_clients=" + std::to_string(job.cell.n_clients) +
                      " alpha=" + format_float(job.cell.alpha) +
                      " epsilon=" + format_float(job.cell.epsilon) +
                      " seed=" + std::to_string(job.seed) + ": " + e.what();
    }
  };

  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      run_job(j);
      if (on_row && job_errors[j].empty()) {
        for (const auto& row : job_rows[j]) on_row(row);
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t j = next.fetch_add(1);
          if (j >= jobs.size()) return;
          run_job(j);
        }
      });
    }
    for (auto& t : pool) t.join();
    if (on_row) {
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (!job_errors[j].empty()) continue;
        for (const auto& row : job_rows[j]) on_row(row);
      }
    }
  }

  ExperimentResult result;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!job_errors[j].empty()) {
      result.failures.push_back(std::move(job_errors[j]));
      continue;
    }
    for (auto& row : job_rows[j]) result.rows.push_back(std::move(row));
  }
  if (!result.rows.empty() && result.failures.empty()) {
    result.summaries = compute_summaries(result.rows, cfg);
  }
  return result;
}

}  // namespace fedhybrid::experiment

#endif  // FEDHYBRID_EXPERIMENT_RUNNER_HPP_
