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

#ifndef FEDHYBRID_FL_PROTOCOL_HPP_
#define FEDHYBRID_FL_PROTOCOL_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedhybrid/dp/mechanism.hpp"
#include "fedhybrid/errors.hpp"
#include "fedhybrid/fl/modes.hpp"
#include "fedhybrid/he/backend.hpp"
#include "fedhybrid/he/pack.hpp"
#include "fedhybrid/he/scheme.hpp"
#include "fedhybrid/model.hpp"
#include "fedhybrid/param_vector.hpp"
#include "fedhybrid/rng.hpp"

namespace fedhybrid::fl {

// Labels for the per-purpose seed streams hanging off a client's round seed.
inline constexpr std::uint64_t kSeedShuffle = 0;
inline constexpr std::uint64_t kSeedDpNoise = 1;
inline constexpr std::uint64_t kSeedEncrypt = 2;

struct LocalTrainConfig {
  double eta = 0.05;
  std::size_t local_epochs = 1;
  std::size_t batch_size = 0;  // 0 = full batch
};

// Local step of the round: with one epoch of full-batch training this is the
// exact dataset gradient; otherwise the client runs mini-batch SGD locally
// and reports the gradient-equivalent update (W_t - W_local) / eta.
inline ParamVector local_gradient(const RegressionModel& global_model,
                                  const Dataset& shard,
                                  const LocalTrainConfig& cfg,
                                  std::uint64_t shuffle_seed) {
  require(shard.sample_count() > 0, "local_gradient: empty shard");
  require(cfg.local_epochs >= 1, "local_gradient: need at least one epoch");
  require(cfg.eta > 0.0, "local_gradient: eta must be positive");

  const bool full_batch =
      cfg.batch_size == 0 || cfg.batch_size >= shard.sample_count();
  if (cfg.local_epochs == 1 && full_batch) {
    return gradient(global_model, shard);
  }

  RegressionModel model = global_model;
  std::vector<std::size_t> order(shard.sample_count());
  for (std::size_t e = 0; e < cfg.local_epochs; ++e) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 engine(derive_seed(shuffle_seed, e));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_below(engine, i)]);
    }
    const std::size_t step =
        full_batch ? shard.sample_count() : cfg.batch_size;
    for (std::size_t start = 0; start < order.size(); start += step) {
      Dataset batch(shard.n_features(), shard.n_targets());
      const std::size_t end = std::min(start + step, order.size());
      for (std::size_t i = start; i < end; ++i) {
        batch.add_sample(shard.input(order[i]), shard.target(order[i]));
      }
      model = model.with_weights(
          sgd_step(model.weights(), gradient(model, batch), cfg.eta));
    }
  }
  return scale(subtract(global_model.weights(), model.weights()),
               1.0 / cfg.eta);
}

// A client's contribution for one round: exactly one payload is populated.
struct ProtectedUpdate {
  int client_id = 0;
  bool is_cipher = false;
  ParamVector vector_payload;               // DP-noised or plain gradient
  std::vector<std::uint8_t> cipher_payload; // serialized ciphertext chunks
  double local_ms = 0.0;
  double protect_ms = 0.0;
};

namespace detail {

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled) { reset(); }

  void reset() {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }

  // Milliseconds since the last reset; 0 when timing is disabled.
  double lap() {
    if (!enabled_) return 0.0;
    const auto now = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Runs one client for one round under the given regime: local training, then
// exactly one protection path. RunMode overrides the per-client mode for the
// forced regimes; Hybrid honours client.mode as set by select_modes.
inline ProtectedUpdate client_update(const ClientState& client,
                                     const RegressionModel& global_model,
                                     const LocalTrainConfig& train_cfg,
                                     RunMode run_mode,
                                     const he::AggregationCipherBackend& backend,
                                     std::size_t round, bool timed = false) {
  const std::uint64_t round_seed = derive_seed(client.rng_seed, round);

  ProtectedUpdate update;
  update.client_id = client.id;

  detail::Stopwatch watch(timed);
  const ParamVector grad = local_gradient(global_model, client.train, train_cfg,
                                          derive_seed(round_seed, kSeedShuffle));
  update.local_ms = watch.lap();

  const bool use_he = run_mode == RunMode::kHeOnly ||
                      (run_mode == RunMode::kHybrid &&
                       client.mode == ClientMode::kHe);
  watch.reset();
  if (run_mode == RunMode::kPlain) {
    update.vector_payload = grad;
  } else if (use_he) {
    update.is_cipher = true;
    update.cipher_payload =
        backend.protect(grad, derive_seed(round_seed, kSeedEncrypt));
  } else {
    require(client.dp_params.has_value(),
            "client_update: DP-path client has no privacy parameters");
    update.vector_payload = dp::dp_protect(grad, *client.dp_params,
                                           derive_seed(round_seed, kSeedDpNoise));
  }
  update.protect_ms = watch.lap();
  return update;
}

// Homomorphic aggregation: fold all ciphertext chunk lists with add_cipher,
// then decrypt the single folded list. An empty group contributes an exact
// zero vector.
inline ParamVector aggregate_he(
    std::span<const std::vector<he::HeCiphertext>> updates,
    const he::SecretKey& secret_key, const he::HeParams& params,
    std::size_t dim) {
  if (updates.empty()) return ParamVector::zeros(dim);
  std::vector<he::HeCiphertext> acc = updates[0];
  for (std::size_t u = 1; u < updates.size(); ++u) {
    require(updates[u].size() == acc.size(),
            "aggregate_he: chunk count mismatch");
    for (std::size_t c = 0; c < acc.size(); ++c) {
      acc[c] = he::add_cipher(acc[c], updates[u][c]);
    }
  }
  return he::decrypt_gradient(acc, secret_key, params, dim);
}

// Plaintext-side aggregation of DP-noised (or plain) updates.
inline ParamVector aggregate_dp(std::span<const ParamVector> updates,
                                std::size_t dim) {
  ParamVector sum = ParamVector::zeros(dim);
  for (const auto& u : updates) {
    sum = add(sum, u);
  }
  return sum;
}

// W_{t+1} = W_t - eta * (g_he + g_dp) / n_clients.
inline ParamVector global_update(const ParamVector& weights,
                                 const ParamVector& g_he,
                                 const ParamVector& g_dp, double eta,
                                 std::size_t n_clients) {
  require(n_clients >= 1, "global_update: need at least one client");
  check_same_dim(weights, g_he, "global_update");
  check_same_dim(weights, g_dp, "global_update");
  const ParamVector mean =
      scale(add(g_he, g_dp), 1.0 / static_cast<double>(n_clients));
  return sgd_step(weights, mean, eta);
}

struct PhaseTimes {
  double total_ms = 0.0;
  double broadcast_ms = 0.0;
  double local_ms = 0.0;
  double protect_ms = 0.0;
  double agg_he_ms = 0.0;
  double decrypt_ms = 0.0;
  double agg_dp_ms = 0.0;
  double update_ms = 0.0;
  double test_ms = 0.0;
};

struct RoundRecord {
  std::size_t round = 0;
  double global_mse = 0.0;
  std::size_t n_he = 0;
  std::size_t n_dp = 0;
  PhaseTimes times;
};

struct RoundConfig {
  RunMode run_mode = RunMode::kHybrid;
  ModeSelectionPolicy policy = FixedRatio{0.5};
  LocalTrainConfig train;
  bool timed = true;
};

struct ServerState {
  RegressionModel model;
  std::shared_ptr<const he::AggregationCipherBackend> backend;
  Dataset test_set;
  std::size_t round = 0;
};

// One synchronous round. Phase timings model a sequential deployment:
// per-client costs are summed, server phases run once. All phases of the
// round happen even when a group is empty; an empty group aggregates to a
// zero vector.
inline RoundRecord run_round(ServerState& server,
                             std::vector<ClientState>& clients,
                             const RoundConfig& cfg) {
  require(!clients.empty(), "run_round: no clients");
  require(server.backend != nullptr, "run_round: missing cipher backend");
  require(server.test_set.sample_count() > 0, "run_round: empty test set");

  RoundRecord record;
  record.round = server.round;
  PhaseTimes& t = record.times;

  if (cfg.run_mode == RunMode::kHybrid) {
    select_modes(clients, cfg.policy);
  }

  // Broadcast: every client receives its own copy of the global weights.
  detail::Stopwatch watch(cfg.timed);
  std::vector<RegressionModel> local_models;
  local_models.reserve(clients.size());
  for (std::size_t i = 0; i < clients.size(); ++i) {
    local_models.push_back(server.model);
  }
  t.broadcast_ms = watch.lap();

  // Local training + protection, sequential over clients.
  std::vector<ProtectedUpdate> updates;
  updates.reserve(clients.size());
  for (std::size_t i = 0; i < clients.size(); ++i) {
    updates.push_back(client_update(clients[i], local_models[i], cfg.train,
                                    cfg.run_mode, *server.backend,
                                    server.round, cfg.timed));
    t.local_ms += updates.back().local_ms;
    t.protect_ms += updates.back().protect_ms;
  }

  const std::size_t dim = server.model.weights().dim();

  // Split into the cipher and plaintext groups, preserving client order.
  std::vector<std::vector<std::uint8_t>> cipher_updates;
  std::vector<ParamVector> vector_updates;
  for (auto& u : updates) {
    if (u.is_cipher) {
      record.n_he += 1;
      cipher_updates.push_back(std::move(u.cipher_payload));
    } else {
      record.n_dp += 1;
      vector_updates.push_back(std::move(u.vector_payload));
    }
  }

  // Homomorphic aggregation: all ciphertext folding happens before the one
  // decryption below.
  watch.reset();
  std::vector<std::uint8_t> cipher_aggregate;
  if (!cipher_updates.empty()) {
    cipher_aggregate = server.backend->combine(cipher_updates);
  }
  t.agg_he_ms = watch.lap();

  ParamVector g_he = ParamVector::zeros(dim);
  watch.reset();
  if (!cipher_aggregate.empty()) {
    g_he = server.backend->open(cipher_aggregate, dim);
  }
  t.decrypt_ms = watch.lap();

  watch.reset();
  const ParamVector g_dp = aggregate_dp(vector_updates, dim);
  t.agg_dp_ms = watch.lap();

  watch.reset();
  server.model = server.model.with_weights(
      global_update(server.model.weights(), g_he, g_dp, cfg.train.eta,
                    clients.size()));
  t.update_ms = watch.lap();

  watch.reset();
  record.global_mse = dataset_mse(server.model, server.test_set);
  t.test_ms = watch.lap();

  t.total_ms = t.broadcast_ms + t.local_ms + t.protect_ms + t.agg_he_ms +
               t.decrypt_ms + t.agg_dp_ms + t.update_ms + t.test_ms;

  server.round += 1;
  return record;
}

struct TrainingConfig {
  RoundConfig round;
  std::size_t rounds = 10;
};

struct TrainingResult {
  RegressionModel initial_model;
  RegressionModel final_model;
  std::vector<RoundRecord> records;
};

// Full run: bias-initialized global model, then a fixed number of rounds.
inline TrainingResult run_training(
    std::vector<ClientState> clients, Dataset test_set,
    const TrainingConfig& cfg,
    std::shared_ptr<const he::AggregationCipherBackend> backend) {
  require(!clients.empty(), "run_training: no clients");
  require(cfg.rounds >= 1, "run_training: need at least one round");

  // The initial bias comes from the pooled training targets, matching the
  // warm start a coordinating server can compute from client summaries.
  Dataset pooled(clients[0].train.n_features(), clients[0].train.n_targets());
  for (const auto& c : clients) pooled.append(c.train);
  RegressionModel model(pooled.n_features(), pooled.n_targets());
  model = mean_target_bias_init(model, pooled);

  ServerState server{model, std::move(backend), std::move(test_set), 0};
  TrainingResult result{model, model, {}};
  result.records.reserve(cfg.rounds);
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    result.records.push_back(run_round(server, clients, cfg.round));
  }
  result.final_model = server.model;
  return result;
}

}  // namespace fedhybrid::fl

#endif  // FEDHYBRID_FL_PROTOCOL_HPP_
