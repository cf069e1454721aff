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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedhybrid/fedhybrid.hpp"

namespace {

using namespace fedhybrid;

struct KeyFlag {
  std::string flag;
  std::string section;
  std::string key;
  std::string help;
  std::string value{};
  CLI::Option* option = nullptr;
};

// Every flag funnels into the same key dispatch as the config file, so the
// two override surfaces cannot drift apart.
std::vector<KeyFlag> make_key_flags() {
  return {
      {"--mode", "", "mode", "Run mode(s): plain, dp-only, he-only, hybrid"},
      {"--n-clients", "", "n_clients", "Client count(s), e.g. 5 or [2,5,17]"},
      {"--alpha", "", "alpha", "HE ratio(s) for hybrid runs"},
      {"--epsilon", "", "epsilon", "Privacy budget(s)"},
      {"--delta", "", "delta", "Privacy delta"},
      {"--clip-norm", "", "clip_norm", "L2 clip bound"},
      {"--rounds", "", "rounds", "Federated rounds per run"},
      {"--eta", "", "eta", "Learning rate"},
      {"--seeds", "", "seeds", "Run seed(s)"},
      {"--he-params", "", "he_params", "Cipher preset: paper or desk"},
      {"--holdout-fraction", "", "holdout_fraction", "Per-patient test share"},
      {"--local-epochs", "", "local_epochs", "Local epochs per round"},
      {"--batch-size", "", "batch_size", "Local batch size (0 = full batch)"},
      {"--timing", "", "timing", "Timing columns: wall or off"},
      {"--threads", "", "threads", "Worker threads for the sweep"},
      {"--out", "", "out", "Output CSV path"},
      {"--synth-n-features", "synth", "n_features", "Feature width"},
      {"--synth-n-targets", "synth", "n_targets", "Target width"},
      {"--synth-patients-per-client", "synth", "patients_per_client",
       "Patients per client"},
      {"--synth-spots-per-patient", "synth", "spots_per_patient",
       "Spots per patient"},
      {"--synth-noise-stddev", "synth", "noise_stddev",
       "Observation noise stddev"},
      {"--synth-heterogeneity", "synth", "heterogeneity",
       "Per-patient shift stddev"},
      {"--synth-master-seed", "synth", "master_seed",
       "Fixed cohort seed (0 = derive from each run seed)"},
  };
}

std::string summary_path_for(const std::string& csv_path) {
  const std::string suffix = ".csv";
  if (csv_path.size() > suffix.size() &&
      csv_path.compare(csv_path.size() - suffix.size(), suffix.size(),
                       suffix) == 0) {
    return csv_path.substr(0, csv_path.size() - suffix.size()) +
           ".summary.csv";
  }
  return csv_path + ".summary.csv";
}

int command_run(const std::string& config_path, std::vector<KeyFlag>& flags) {
  experiment::ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = experiment::parse_config_file(config_path);
  }
  for (const auto& f : flags) {
    if (f.option != nullptr && f.option->count() > 0) {
      experiment::set_config_key(cfg, f.section, f.key, f.value);
    }
  }
  experiment::validate_config(cfg);

  const auto parent = std::filesystem::path(cfg.output_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open output file '" + cfg.output_path + "'");
  }
  out << experiment::kCsvHeader << '\n';

  const auto cells = experiment::enumerate_cells(cfg);
  std::cerr << "fedhybrid: " << cells.size() << " cells x " << cfg.seeds.size()
            << " seeds, " << cfg.rounds << " rounds each, writing "
            << cfg.output_path << "\n";

  std::size_t rows_written = 0;
  const auto result = experiment::run_experiment(
      cfg, [&](const experiment::ResultRow& row) {
        out << experiment::format_row(row) << '\n';
        ++rows_written;
      });
  out.flush();
  if (!out.good()) {
    throw IoError("write failed for '" + cfg.output_path + "'");
  }

  for (const auto& failure : result.failures) {
    std::cerr << "fedhybrid: run failed: " << failure << "\n";
  }
  if (!result.summaries.empty()) {
    const std::string spath = summary_path_for(cfg.output_path);
    experiment::emit_summary_csv(result.summaries, spath);
    std::cerr << "fedhybrid: wrote " << rows_written << " rows and summary "
              << spath << "\n";
  }
  return result.ok() ? 0 : 1;
}

int command_dump_cohort(std::uint64_t seed, std::size_t n_clients,
                        double holdout_fraction, const std::string& out_dir,
                        std::vector<KeyFlag>& flags) {
  experiment::ExperimentConfig cfg;
  for (const auto& f : flags) {
    if (f.option != nullptr && f.option->count() > 0 && f.section == "synth") {
      experiment::set_config_key(cfg, f.section, f.key, f.value);
    }
  }
  synth::SynthSpec spec = cfg.synth;
  spec.master_seed = seed;
  synth::validate_spec(spec);

  const auto cohort = synth::generate_cohort(spec, n_clients);
  const auto split = synth::holdout_split(cohort, holdout_fraction);
  for (const auto& shard : split.clients) {
    const std::string path =
        out_dir + "/client_" + std::to_string(shard.id) + ".csv";
    synth::dump_dataset(shard.train, seed, path);
    std::cerr << "fedhybrid: wrote " << path << " (" << shard.train.sample_count()
              << " samples)\n";
  }
  const std::string test_path = out_dir + "/test.csv";
  synth::dump_dataset(split.test, seed, test_path);
  std::cerr << "fedhybrid: wrote " << test_path << " ("
            << split.test.sample_count() << " samples)\n";
  return 0;
}

int command_calibrate(double epsilon, double delta, double sensitivity) {
  const double sigma = dp::calibrate_sigma(epsilon, delta, sensitivity);
  const double classical =
      dp::classical_gaussian_sigma(epsilon, delta, sensitivity);
  const double achieved = dp::gaussian_mechanism_delta(epsilon, sensitivity, sigma);
  std::printf("sigma=%.12g\nclassical_bound=%.12g\nachieved_delta=%.12g\n",
              sigma, classical, achieved);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid-protection federated learning simulator"};
  app.require_subcommand(1);

  auto run_flags = make_key_flags();
  std::string config_path;
  CLI::App* run = app.add_subcommand(
      "run", "Run an experiment sweep and write per-round CSV results");
  run->add_option("--config", config_path,
                  "Config file with key = value lines");
  for (auto& f : run_flags) {
    f.option = run->add_option(f.flag, f.value, f.help);
  }

  auto dump_flags = make_key_flags();
  std::uint64_t dump_seed = 1;
  std::size_t dump_clients = 5;
  double dump_holdout = 0.2;
  std::string dump_dir = ".";
  CLI::App* dump = app.add_subcommand(
      "dump-cohort", "Generate a cohort and write its datasets as CSV");
  dump->add_option("--seed", dump_seed, "Cohort master seed");
  dump->add_option("--n-clients", dump_clients, "Number of clients");
  dump->add_option("--holdout-fraction", dump_holdout,
                   "Per-patient test share");
  dump->add_option("--out-dir", dump_dir, "Output directory (must exist)");
  for (auto& f : dump_flags) {
    if (f.section == "synth") {
      f.option = dump->add_option(f.flag, f.value, f.help);
    }
  }

  double cal_epsilon = 0.0, cal_delta = 0.0, cal_sensitivity = 0.0;
  CLI::App* cal = app.add_subcommand(
      "calibrate", "Print the calibrated Gaussian noise scale for a budget");
  cal->add_option("--epsilon", cal_epsilon, "Privacy budget")->required();
  cal->add_option("--delta", cal_delta, "Privacy delta")->required();
  cal->add_option("--sensitivity", cal_sensitivity, "L2 sensitivity")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return command_run(config_path, run_flags);
    if (dump->parsed()) {
      return command_dump_cohort(dump_seed, dump_clients, dump_holdout,
                                 dump_dir, dump_flags);
    }
    if (cal->parsed()) {
      return command_calibrate(cal_epsilon, cal_delta, cal_sensitivity);
    }
  } catch (const fedhybrid::ConfigError& e) {
    std::cerr << "fedhybrid: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fedhybrid: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
