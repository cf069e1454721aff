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

#ifndef FEDHYBRID_FL_MODES_HPP_
#define FEDHYBRID_FL_MODES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fedhybrid/dp/mechanism.hpp"
#include "fedhybrid/errors.hpp"
#include "fedhybrid/model.hpp"

namespace fedhybrid::fl {

// Per-client protection path within a hybrid round.
enum class ClientMode { kHe, kDp };

// Protection regime of a whole run. Plain is the unprotected baseline;
// DP-only and HE-only force every client onto one path; Hybrid partitions
// clients per round by the selection policy.
enum class RunMode { kPlain, kDpOnly, kHeOnly, kHybrid };

inline std::string_view run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kPlain:
      return "plain";
    case RunMode::kDpOnly:
      return "dp-only";
    case RunMode::kHeOnly:
      return "he-only";
    case RunMode::kHybrid:
      return "hybrid";
  }
  throw ContractError("run_mode_name: invalid mode");
}

inline RunMode parse_run_mode(std::string_view name) {
  for (RunMode m : {RunMode::kPlain, RunMode::kDpOnly, RunMode::kHeOnly,
                    RunMode::kHybrid}) {
    if (run_mode_name(m) == name) return m;
  }
  throw ConfigError("mode: unknown value '" + std::string(name) +
                    "' (expected plain, dp-only, he-only or hybrid)");
}

struct ClientState {
  int id = 0;
  Dataset train;
  double capacity = 0.0;       // abstract compute score; higher can afford HE
  std::uint64_t rng_seed = 0;  // derived from (master seed, client id)
  ClientMode mode = ClientMode::kDp;
  std::optional<dp::PrivacyParams> dp_params;
};

// Round-half-to-even for non-negative values, so e.g. 2.5 -> 2 and 3.5 -> 4.
inline std::size_t round_half_to_even(double x) {
  require(std::isfinite(x) && x >= 0.0,
          "round_half_to_even: need a finite non-negative value");
  const double floor_x = std::floor(x);
  const double frac = x - floor_x;
  const auto f = static_cast<std::size_t>(floor_x);
  if (frac > 0.5) return f + 1;
  if (frac < 0.5) return f;
  return f % 2 == 0 ? f : f + 1;
}

// Assign the HE path to the round(alpha * N) highest-capacity clients, ties
// broken by ascending client id; everyone else takes the DP path.
struct FixedRatio {
  double alpha = 0.5;
};

// HE for every client at or above the capacity threshold.
struct CapacityThreshold {
  double min_capacity = 0.0;
};

// Caller-provided assignment, one entry per client in order.
struct ExplicitAssignment {
  std::vector<ClientMode> modes;
};

using ModeSelectionPolicy =
    std::variant<FixedRatio, CapacityThreshold, ExplicitAssignment>;

inline std::size_t he_count_for_ratio(double alpha, std::size_t n_clients) {
  require(alpha >= 0.0 && alpha <= 1.0,
          "select_modes: alpha must lie in [0, 1]");
  return round_half_to_even(alpha * static_cast<double>(n_clients));
}

inline void select_modes(std::vector<ClientState>& clients,
                         const ModeSelectionPolicy& policy) {
  require(!clients.empty(), "select_modes: no clients");
  if (const auto* ratio = std::get_if<FixedRatio>(&policy)) {
    const std::size_t n_he = he_count_for_ratio(ratio->alpha, clients.size());
    std::vector<std::size_t> order(clients.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (clients[a].capacity != clients[b].capacity) {
        return clients[a].capacity > clients[b].capacity;
      }
      return clients[a].id < clients[b].id;
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
      clients[order[i]].mode = i < n_he ? ClientMode::kHe : ClientMode::kDp;
    }
  } else if (const auto* threshold = std::get_if<CapacityThreshold>(&policy)) {
    for (auto& client : clients) {
      client.mode = client.capacity >= threshold->min_capacity
                        ? ClientMode::kHe
                        : ClientMode::kDp;
    }
  } else {
    const auto& assignment = std::get<ExplicitAssignment>(policy);
    require(assignment.modes.size() == clients.size(),
            "select_modes: explicit assignment size mismatch");
    for (std::size_t i = 0; i < clients.size(); ++i) {
      clients[i].mode = assignment.modes[i];
    }
  }
}

}  // namespace fedhybrid::fl

#endif  // FEDHYBRID_FL_MODES_HPP_
