#include "gtflat/fl_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gtflat/metrics.hpp"
#include "gtflat/rng.hpp"

namespace gtflat {

void validate_train_config(const TrainConfig& cfg) {
  if (cfg.rounds < 1) throw std::invalid_argument("TrainConfig: rounds must be >= 1");
  if (cfg.clients < 1) throw std::invalid_argument("TrainConfig: clients must be >= 1");
  if (!(cfg.active_ratio > 0.0) || cfg.active_ratio > 1.0) {
    throw std::invalid_argument("TrainConfig: active_ratio must be in (0, 1]");
  }
  if (cfg.local_epochs < 1) throw std::invalid_argument("TrainConfig: local_epochs must be >= 1");
  // lr == 0 is allowed: a zero step leaves the model unchanged, which is the
  // documented degenerate behavior of local_train.
  if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) {
    throw std::invalid_argument("TrainConfig: lr must be finite and >= 0");
  }
  if (cfg.batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (cfg.prox_mu < 0.0) throw std::invalid_argument("TrainConfig: prox_mu must be >= 0");
  validate_dynamics_config(cfg.dynamics);
}

std::vector<std::size_t> select_active_users(std::mt19937_64& rng, std::size_t m, double ratio) {
  if (m < 1) throw std::invalid_argument("select_active_users: m must be >= 1");
  if (!(ratio > 0.0) || ratio > 1.0) {
    throw std::invalid_argument("select_active_users: ratio must be in (0, 1]");
  }
  // Tiny epsilon guards exact integer products against float excess
  // (e.g. 0.1 * 50 lands a hair above 5).
  std::size_t count = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(m) - 1e-9));
  count = std::min(std::max<std::size_t>(count, 1), m);

  // Partial Fisher-Yates: the first `count` slots become the sample.
  std::vector<std::size_t> ids(m);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, m - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  return ids;
}

ParamVector local_train(const ClientState& client, const ParamVector& global,
                        const TrainConfig& cfg, std::mt19937_64& rng) {
  validate_train_config(cfg);
  if (client.data.n < 1) throw std::invalid_argument("local_train: client holds no data");
  ParamVector theta = global;

  std::vector<std::size_t> order(client.data.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> batch;
  for (std::size_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::size_t end = std::min(start + cfg.batch_size, order.size());
      batch.assign(order.begin() + start, order.begin() + end);
      ParamVector grad = model_gradient(theta, client.data, batch);
      for (std::size_t l = 0; l < theta.layer_count(); ++l) {
        std::vector<double>& tv = theta.values(l);
        const std::vector<double>& gv = grad.values(l);
        const std::vector<double>& ov = global.values(l);
        for (std::size_t s = 0; s < tv.size(); ++s) {
          double g = gv[s];
          if (cfg.prox_mu > 0.0) g += cfg.prox_mu * (tv[s] - ov[s]);
          tv[s] -= cfg.lr * g;
        }
      }
    }
    for (std::size_t l = 0; l < theta.layer_count(); ++l) {
      for (double v : theta.values(l)) {
        if (!std::isfinite(v)) {
          throw std::runtime_error("local_train: parameters diverged (non-finite value)");
        }
      }
    }
  }
  return theta;
}

WeightVector fedavg_weights(const std::vector<const ClientState*>& active) {
  if (active.empty()) throw std::invalid_argument("fedavg_weights: empty active set");
  double total = 0.0;
  for (const ClientState* c : active) {
    if (c == nullptr || c->data.n < 1) {
      throw std::invalid_argument("fedavg_weights: active client without data");
    }
    total += static_cast<double>(c->data.n);
  }
  std::vector<double> w(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) {
    w[k] = static_cast<double>(active[k]->data.n) / total;
  }
  return WeightVector(std::move(w));
}

RoundResult run_round(const std::vector<ClientState>& clients, const ParamVector& global,
                      const TrainConfig& cfg, const Dataset& test,
                      std::mt19937_64& select_rng, std::size_t round_idx) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::size_t> active = select_active_users(select_rng, clients.size(), cfg.active_ratio);

  // Local training; every client's stream depends only on (seed, round, id).
  std::vector<ParamVector> received;
  std::vector<std::vector<double>> updates;
  received.reserve(active.size());
  updates.reserve(active.size());
  std::vector<double> base = flatten(global);
  for (std::size_t id : active) {
    std::mt19937_64 client_rng = rng::stream(cfg.seed, rng::kClient, round_idx, id);
    received.push_back(local_train(clients.at(id), global, cfg, client_rng));
    std::vector<double> delta = flatten(received.back());
    for (std::size_t s = 0; s < delta.size(); ++s) delta[s] -= base[s];
    updates.push_back(std::move(delta));
  }

  WeightVector omega({1.0});
  if (cfg.aggregator == Aggregator::fedavg) {
    std::vector<const ClientState*> act;
    act.reserve(active.size());
    for (std::size_t id : active) act.push_back(&clients.at(id));
    omega = fedavg_weights(act);
  } else {
    // The game is played over the round's updates; distances between updates
    // are what the evaluation matrix encodes.
    std::vector<ParamVector> update_vecs;
    update_vecs.reserve(updates.size());
    for (const std::vector<double>& u : updates) {
      update_vecs.push_back(ParamVector({Layer{{u.size()}, u}}));
    }
    omega = solve(update_vecs, cfg.dynamics).weights;
  }

  ParamVector next_global = weighted_average(received, omega);
  RoundRecord rec;
  rec.round = round_idx;
  rec.active_ids = active;
  rec.omega = omega.get();
  rec.test_accuracy = top1_accuracy(next_global, test);
  rec.test_loss = model_loss(next_global, test, {});
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return RoundResult{std::move(next_global), std::move(rec), std::move(updates)};
}

TrainingRun run_training(const TrainConfig& cfg, const std::vector<ClientState>& clients,
                         const Dataset& test) {
  validate_train_config(cfg);
  if (clients.empty()) throw std::invalid_argument("run_training: no clients");
  validate_dataset(test);
  for (const ClientState& c : clients) {
    if (c.data.n < 1) throw std::invalid_argument("run_training: client without data");
    if (c.data.d != test.d || c.data.classes != test.classes) {
      throw std::invalid_argument("run_training: client/test dataset shape mismatch");
    }
  }

  std::mt19937_64 init_rng = rng::stream(cfg.seed, rng::kGlobalInit);
  ParamVector global = init_model(test.classes, test.d, cfg.hidden, init_rng);

  TrainingRun run;
  run.records.reserve(cfg.rounds);
  for (std::size_t r = 1; r <= cfg.rounds; ++r) {
    std::mt19937_64 select_rng = rng::stream(cfg.seed, rng::kSelect, r);
    RoundResult res = run_round(clients, global, cfg, test, select_rng, r);
    global = std::move(res.global);
    run.records.push_back(std::move(res.record));
    if (r == 1) run.first_round_updates = std::move(res.updates);
  }
  run.final_model = std::move(global);
  return run;
}

}  // namespace gtflat
