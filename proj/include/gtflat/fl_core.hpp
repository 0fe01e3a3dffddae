#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gtflat/data_gen.hpp"
#include "gtflat/dynamics.hpp"
#include "gtflat/model.hpp"

namespace gtflat {

// One simulated client: its stable id and local data shard.
struct ClientState {
  std::size_t id = 0;
  Dataset data;  // n_k = data.n
};

enum class Aggregator { fedavg, gtflat };

struct TrainConfig {
  std::size_t rounds = 200;
  std::size_t clients = 50;
  double active_ratio = 0.10;
  std::size_t local_epochs = 20;
  double lr = 0.05;
  std::size_t batch_size = 32;
  double prox_mu = 0.0;    // proximal pull toward the round's global model; 0 disables
  std::size_t hidden = 0;  // hidden width; 0 = plain logistic regression
  Aggregator aggregator = Aggregator::fedavg;
  std::uint64_t seed = 42;
  DynamicsConfig dynamics;
};

void validate_train_config(const TrainConfig& cfg);

struct RoundRecord {
  std::size_t round = 0;                 // 1-based
  std::vector<std::size_t> active_ids;   // ascending
  std::vector<double> omega;             // aggregation weights, aligned with active_ids
  double test_accuracy = 0.0;
  double test_loss = 0.0;
  double wall_time = 0.0;                // seconds
};

// ceil(ratio * m) distinct ids, sampled uniformly without replacement,
// returned ascending.
std::vector<std::size_t> select_active_users(std::mt19937_64& rng, std::size_t m, double ratio);

// Copies the global model and runs local_epochs passes of mini-batch SGD on
// softmax cross-entropy, plus an optional proximal pull
// prox_mu * (theta - global). Batch order reshuffles each epoch from rng.
ParamVector local_train(const ClientState& client, const ParamVector& global,
                        const TrainConfig& cfg, std::mt19937_64& rng);

// Weights proportional to the active clients' sample counts.
WeightVector fedavg_weights(const std::vector<const ClientState*>& active);

struct RoundResult {
  ParamVector global;
  RoundRecord record;
  // Flattened per-client updates (trained parameters minus the broadcast
  // global), aligned with record.active_ids; kept for logging.
  std::vector<std::vector<double>> updates;
};

// One server round: select active users, train each, weight the received
// models (fedavg counts or the game solve over the updates), aggregate, and
// evaluate on the held-out set. select_rng drives only the selection draw.
RoundResult run_round(const std::vector<ClientState>& clients, const ParamVector& global,
                      const TrainConfig& cfg, const Dataset& test,
                      std::mt19937_64& select_rng, std::size_t round_idx);

struct TrainingRun {
  std::vector<RoundRecord> records;
  ParamVector final_model;
  std::vector<std::vector<double>> first_round_updates;  // round 1's updates, for logging
};

// Algorithm: initialize the global model from cfg.seed, then run cfg.rounds
// rounds. Deterministic given (cfg, clients, test): per-purpose rng streams
// are derived from (seed, tag, round, client id), so the client-side work is
// identical across aggregators at equal seeds.
TrainingRun run_training(const TrainConfig& cfg, const std::vector<ClientState>& clients,
                         const Dataset& test);

}  // namespace gtflat
