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

#ifndef FEDHYBRID_EXPERIMENT_CONFIG_HPP_
#define FEDHYBRID_EXPERIMENT_CONFIG_HPP_

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fedhybrid/errors.hpp"
#include "fedhybrid/fl/modes.hpp"
#include "fedhybrid/synth/cohort.hpp"

namespace fedhybrid::experiment {

enum class TimingMode { kWall, kOff };

// Sweep definition plus fixed run parameters. List-valued fields span a
// cartesian sweep; scalars apply to every cell.
struct ExperimentConfig {
  std::vector<fl::RunMode> modes{fl::RunMode::kHybrid};
  std::vector<std::size_t> n_clients{5};
  std::vector<double> alphas{0.5};
  std::vector<double> epsilons{4.0};
  double delta = 1e-5;
  double clip_norm = 20.0;
  std::size_t rounds = 10;
  double eta = 0.05;
  std::vector<std::uint64_t> seeds{101, 201, 301, 401, 501, 601};
  std::string he_params = "desk";  // "paper" | "desk"
  double holdout_fraction = 0.2;
  std::size_t local_epochs = 1;
  std::size_t batch_size = 0;  // 0 = full batch
  TimingMode timing = TimingMode::kWall;
  std::size_t threads = 1;
  std::string output_path = "results.csv";
  // synth.master_seed = 0 derives the cohort seed from each run seed; any
  // other value pins the data across the whole seed sweep.
  synth::SynthSpec synth{32, 8, 3, 100, 0.25, 0.3, 0};
};

// --- low-level value parsing --------------------------------------------------

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// A value is either a bare scalar or a bracketed comma-separated list.
inline std::vector<std::string> split_value_list(const std::string& value,
                                                 const std::string& field) {
  std::string inner = value;
  if (!value.empty() && value.front() == '[') {
    if (value.back() != ']') {
      throw ConfigError(field + ": unterminated list '" + value + "'");
    }
    inner = value.substr(1, value.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream ss(inner);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const std::string item = trim(cell);
    if (item.empty()) {
      throw ConfigError(field + ": empty list element in '" + value + "'");
    }
    items.push_back(item);
  }
  if (items.empty()) {
    throw ConfigError(field + ": empty value");
  }
  return items;
}

inline double parse_double(const std::string& item, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(item, &used);
  } catch (const std::exception&) {
    throw ConfigError(field + ": '" + item + "' is not a number");
  }
  if (used != item.size() || !std::isfinite(v)) {
    throw ConfigError(field + ": '" + item + "' is not a finite number");
  }
  return v;
}

inline std::uint64_t parse_u64(const std::string& item,
                               const std::string& field) {
  if (item.empty() || item[0] == '-' || item[0] == '+') {
    throw ConfigError(field + ": '" + item + "' is not a non-negative integer");
  }
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(item, &used);
  } catch (const std::exception&) {
    throw ConfigError(field + ": '" + item + "' is not a non-negative integer");
  }
  if (used != item.size()) {
    throw ConfigError(field + ": '" + item + "' is not a non-negative integer");
  }
  return v;
}

inline std::size_t parse_count(const std::string& item,
                               const std::string& field) {
  return static_cast<std::size_t>(parse_u64(item, field));
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& value, const std::string& field,
                          Fn parse_one) {
  std::vector<T> out;
  for (const auto& item : split_value_list(value, field)) {
    out.push_back(parse_one(item, field));
  }
  return out;
}

// --- key dispatch --------------------------------------------------------------

// Applies one key=value pair. `section` is "" for top-level keys or a
// section name such as "synth". CLI flags funnel through the same function,
// which keeps file keys and flag names in lockstep.
inline void set_config_key(ExperimentConfig& cfg, const std::string& section,
                           const std::string& key, const std::string& value) {
  const std::string field = section.empty() ? key : "[" + section + "] " + key;
  if (section.empty()) {
    if (key == "mode") {
      cfg.modes.clear();
      for (const auto& item : split_value_list(value, field)) {
        cfg.modes.push_back(fl::parse_run_mode(item));
      }
    } else if (key == "n_clients") {
      cfg.n_clients = parse_list<std::size_t>(value, field, parse_count);
    } else if (key == "alpha") {
      cfg.alphas = parse_list<double>(value, field, parse_double);
    } else if (key == "epsilon") {
      cfg.epsilons = parse_list<double>(value, field, parse_double);
    } else if (key == "delta") {
      cfg.delta = parse_double(value, field);
    } else if (key == "clip_norm") {
      cfg.clip_norm = parse_double(value, field);
    } else if (key == "rounds") {
      cfg.rounds = parse_count(value, field);
    } else if (key == "eta") {
      cfg.eta = parse_double(value, field);
    } else if (key == "seeds") {
      cfg.seeds = parse_list<std::uint64_t>(value, field, parse_u64);
    } else if (key == "he_params") {
      cfg.he_params = trim(value);
    } else if (key == "holdout_fraction") {
      cfg.holdout_fraction = parse_double(value, field);
    } else if (key == "local_epochs") {
      cfg.local_epochs = parse_count(value, field);
    } else if (key == "batch_size") {
      cfg.batch_size = parse_count(value, field);
    } else if (key == "timing") {
      const std::string v = trim(value);
      if (v == "wall") {
        cfg.timing = TimingMode::kWall;
      } else if (v == "off") {
        cfg.timing = TimingMode::kOff;
      } else {
        throw ConfigError("timing: expected 'wall' or 'off', got '" + v + "'");
      }
    } else if (key == "threads") {
      cfg.threads = parse_count(value, field);
    } else if (key == "out") {
      cfg.output_path = trim(value);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
    return;
  }
  if (section == "synth") {
    if (key == "n_features") {
      cfg.synth.n_features = parse_count(value, field);
    } else if (key == "n_targets") {
      cfg.synth.n_targets = parse_count(value, field);
    } else if (key == "patients_per_client") {
      cfg.synth.patients_per_client = parse_count(value, field);
    } else if (key == "spots_per_patient") {
      cfg.synth.spots_per_patient = parse_count(value, field);
    } else if (key == "noise_stddev") {
      cfg.synth.noise_stddev = parse_double(value, field);
    } else if (key == "heterogeneity") {
      cfg.synth.heterogeneity = parse_double(value, field);
    } else if (key == "master_seed") {
      cfg.synth.master_seed = parse_u64(value, field);
    } else {
      throw ConfigError("unknown key '" + key + "' in [synth]");
    }
    return;
  }
  throw ConfigError("unknown section '[" + section + "]'");
}

// --- whole-file parsing ----------------------------------------------------------

// Grammar: `key = value` lines, `#` comments, one optional `[synth]`
// section, list values in brackets. Unknown keys and sections are errors.
inline ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  std::size_t line_no = 0;
  std::stringstream stream{std::string(text)};
  std::string raw;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw ConfigError("unterminated section header");
        }
        section = trim(line.substr(1, line.size() - 2));
        if (section != "synth") {
          throw ConfigError("unknown section '[" + section + "]'");
        }
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key");
      if (value.empty()) throw ConfigError(key + ": empty value");
      set_config_key(cfg, section, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// Cross-field validation, run after the file and any flag overrides.
inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.modes.empty()) throw ConfigError("mode: empty sweep");
  if (cfg.n_clients.empty()) throw ConfigError("n_clients: empty sweep");
  for (std::size_t n : cfg.n_clients) {
    if (n < 1) throw ConfigError("n_clients: must be at least 1");
  }
  if (cfg.alphas.empty()) throw ConfigError("alpha: empty sweep");
  for (double a : cfg.alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw ConfigError("alpha: values must lie in [0, 1]");
    }
  }
  if (cfg.epsilons.empty()) throw ConfigError("epsilon: empty sweep");
  for (double e : cfg.epsilons) {
    if (!(e > 0.0)) throw ConfigError("epsilon: values must be positive");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw ConfigError("delta: must lie in (0, 1)");
  }
  if (!(cfg.clip_norm > 0.0)) throw ConfigError("clip_norm: must be positive");
  if (cfg.rounds < 1) throw ConfigError("rounds: must be at least 1");
  if (!(cfg.eta > 0.0)) throw ConfigError("eta: must be positive");
  if (cfg.seeds.empty()) throw ConfigError("seeds: empty list");
  if (cfg.he_params != "paper" && cfg.he_params != "desk") {
    throw ConfigError("he_params: expected 'paper' or 'desk', got '" +
                      cfg.he_params + "'");
  }
  if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
    throw ConfigError("holdout_fraction: must lie in (0, 1)");
  }
  if (cfg.local_epochs < 1) throw ConfigError("local_epochs: must be at least 1");
  if (cfg.threads < 1) throw ConfigError("threads: must be at least 1");
  if (cfg.output_path.empty()) throw ConfigError("out: empty path");
  try {
    synth::validate_spec(cfg.synth);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("[synth] ") + e.what());
  }
}

}  // namespace fedhybrid::experiment

#endif  // FEDHYBRID_EXPERIMENT_CONFIG_HPP_
