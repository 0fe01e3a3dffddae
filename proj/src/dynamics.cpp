#include "gtflat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gtflat {

PopulationState::PopulationState(std::size_t k, std::vector<double> entries)
    : k_(k), x_(std::move(entries)) {
  if (k_ == 0) throw std::invalid_argument("PopulationState: k must be >= 1");
  if (x_.size() != k_ * k_) {
    throw std::invalid_argument("PopulationState: entry count does not match k*k");
  }
  for (std::size_t i = 0; i < k_; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < k_; ++j) {
      double v = x_[i * k_ + j];
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("PopulationState: entries must be finite and non-negative");
      }
      if (i == j && v != 0.0) {
        throw std::invalid_argument("PopulationState: diagonal must be exactly zero");
      }
      row_sum += v;
    }
    // k == 1 has no legal strategy: the single row is all zero.
    double want = (k_ == 1) ? 0.0 : 1.0;
    if (std::abs(row_sum - want) > 1e-9) {
      throw std::invalid_argument("PopulationState: row does not sum to 1 within 1e-9");
    }
  }
}

void validate_dynamics_config(const DynamicsConfig& cfg) {
  if (cfg.generations < 1) throw std::invalid_argument("DynamicsConfig: generations must be >= 1");
  if (!(cfg.tau > 0.0)) throw std::invalid_argument("DynamicsConfig: tau must be > 0");
  if (!(cfg.stationarity_tol > 0.0)) {
    throw std::invalid_argument("DynamicsConfig: stationarity_tol must be > 0");
  }
  if (cfg.fitness_shift && !(*cfg.fitness_shift >= 0.0)) {
    throw std::invalid_argument("DynamicsConfig: fitness_shift must be >= 0");
  }
}

PopulationState init_uniform_state(std::size_t k) {
  if (k < 2) throw std::invalid_argument("init_uniform_state: k must be >= 2");
  std::vector<double> x(k * k, 0.0);
  double share = 1.0 / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) x[i * k + j] = share;
    }
  }
  return PopulationState(k, std::move(x));
}

double strategy_fitness(const PopulationState& X, const EvalMatrix& phi,
                        std::size_t i, std::size_t j) {
  std::size_t k = X.players();
  if (k != phi.players()) throw std::invalid_argument("strategy_fitness: size mismatch");
  if (i >= k || j >= k) throw std::invalid_argument("strategy_fitness: index out of range");
  if (i == j) throw std::invalid_argument("strategy_fitness: self-selection is illegal");
  double u = 0.0;
  for (std::size_t m = 0; m < k; ++m) {
    double w = (m == j) ? 1.0 : 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      if (p != i) w += X.at(p, m);
    }
    u += (w / static_cast<double>(k)) * phi.at(m, i);
  }
  return u;
}

double average_fitness(const PopulationState& X, const EvalMatrix& phi, std::size_t i) {
  double avg = 0.0;
  for (std::size_t j = 0; j < X.players(); ++j) {
    if (j == i) continue;
    avg += X.at(i, j) * strategy_fitness(X, phi, i, j);
  }
  return avg;
}

double auto_fitness_shift(const EvalMatrix& phi) {
  double max_abs = 0.0;
  for (std::size_t i = 0; i < phi.players(); ++i) {
    for (std::size_t j = 0; j < phi.players(); ++j) {
      max_abs = std::max(max_abs, std::abs(phi.at(i, j)));
    }
  }
  // Scaling with k keeps the relative fitness differences (and hence the
  // per-generation movement) comparable across player counts; the epsilon
  // keeps the all-zero matrix strictly positive.
  return static_cast<double>(phi.players()) * max_abs + 1e-6;
}

PopulationState replicator_step(const PopulationState& X, const EvalMatrix& phi,
                                const DynamicsConfig& cfg) {
  validate_dynamics_config(cfg);
  std::size_t k = X.players();
  if (k != phi.players()) throw std::invalid_argument("replicator_step: size mismatch");
  double shift = cfg.fitness_shift ? *cfg.fitness_shift : auto_fitness_shift(phi);

  std::vector<double> newx(k * k, 0.0);
  std::vector<double> f(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double fbar = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      f[j] = strategy_fitness(X, phi, i, j) + shift;
      if (!(f[j] > 0.0)) {
        throw std::runtime_error("replicator_step: shifted fitness not positive (shift too small)");
      }
      fbar += X.at(i, j) * f[j];
    }
    if (!(fbar > 0.0)) {
      throw std::runtime_error("replicator_step: average fitness not positive (shift too small)");
    }
    double row_sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      double x = X.at(i, j);
      double nx;
      if (cfg.mode == DynamicsMode::euler) {
        nx = x + cfg.tau * x * (f[j] - fbar) / fbar;
      } else {
        nx = x * (1.0 + cfg.tau * (f[j] - fbar) / fbar);
      }
      if (nx < 0.0) nx = 0.0;  // only reachable with tau > 1
      newx[i * k + j] = nx;
      row_sum += nx;
    }
    if (!(row_sum > 0.0)) {
      throw std::runtime_error("replicator_step: population row collapsed to zero");
    }
    // Guard float drift; dividing by an exact 1.0 keeps corner states bitwise.
    if (row_sum != 1.0) {
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) newx[i * k + j] /= row_sum;
      }
    }
  }
  return PopulationState(k, std::move(newx));
}

bool is_stationary(const PopulationState& X, const EvalMatrix& phi, double tol) {
  std::size_t k = X.players();
  if (k == 1) return true;
  if (k != phi.players()) throw std::invalid_argument("is_stationary: size mismatch");
  double max_drift = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double fbar = average_fitness(X, phi, i);
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      double drift = std::abs(X.at(i, j) * (strategy_fitness(X, phi, i, j) - fbar));
      max_drift = std::max(max_drift, drift);
    }
  }
  return max_drift <= tol;
}

WeightVector weights_from_state(const PopulationState& X) {
  std::size_t k = X.players();
  if (k == 1) return WeightVector({1.0});
  std::vector<double> w(k, 0.0);
  for (std::size_t m = 0; m < k; ++m) {
    for (std::size_t i = 0; i < k; ++i) w[m] += X.at(i, m);
    w[m] /= static_cast<double>(k);
  }
  for (double& v : w) {
    if (v < 1e-15) v = 0.0;
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  if (!(sum > 0.0)) throw std::runtime_error("weights_from_state: all weights clamped to zero");
  for (double& v : w) v /= sum;
  return WeightVector(std::move(w));
}

bool verify_msne(const PopulationState& X, const EvalMatrix& phi, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("verify_msne: tol must be > 0");
  std::size_t k = X.players();
  if (k == 1) return true;
  if (k != phi.players()) throw std::invalid_argument("verify_msne: size mismatch");
  for (std::size_t i = 0; i < k; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) best = std::max(best, strategy_fitness(X, phi, i, j));
    }
    // No pure deviation may beat the mixed state's own fitness by more
    // than tol.
    if (best - average_fitness(X, phi, i) > tol) return false;
  }
  return true;
}

namespace {

SolveResult forced_two_player_result() {
  return SolveResult{PopulationState(2, {0.0, 1.0, 1.0, 0.0}),
                     WeightVector({0.5, 0.5}), 0, std::nullopt};
}

}  // namespace

SolveResult solve_matrix(const EvalMatrix& phi, const DynamicsConfig& cfg) {
  validate_dynamics_config(cfg);
  std::size_t k = phi.players();
  if (k == 2) return forced_two_player_result();
  PopulationState x = init_uniform_state(k);
  SolveResult result{x, WeightVector({1.0}), 0, std::nullopt};
  for (int g = 1; g <= cfg.generations; ++g) {
    x = replicator_step(x, phi, cfg);
    result.generations_run = g;
    if (!result.stationary_at && is_stationary(x, phi, cfg.stationarity_tol)) {
      result.stationary_at = g;
    }
    if (cfg.early_exit && result.stationary_at) break;
  }
  result.state = x;
  result.weights = weights_from_state(x);
  return result;
}

SolveResult solve(const std::vector<ParamVector>& models, const DynamicsConfig& cfg) {
  validate_dynamics_config(cfg);
  if (models.empty()) throw std::invalid_argument("solve: empty model list");
  std::size_t k = models.size();
  if (k == 1) {
    return SolveResult{PopulationState(1, {0.0}), WeightVector({1.0}), 0, std::nullopt};
  }
  if (k == 2) return forced_two_player_result();
  return solve_matrix(build_eval_matrix(models), cfg);
}

}  // namespace gtflat
