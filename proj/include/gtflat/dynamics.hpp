#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gtflat/game.hpp"

namespace gtflat {

// X[i][j]: fraction of population i currently playing model j. Diagonal
// entries are exactly zero (self-selection is illegal) and every row lies on
// the probability simplex within 1e-9. k == 1 is the degenerate single-model
// case: one all-zero row, no strategies to mix over.
class PopulationState {
 public:
  PopulationState(std::size_t k, std::vector<double> entries);

  std::size_t players() const { return k_; }
  double at(std::size_t i, std::size_t j) const { return x_[i * k_ + j]; }
  const std::vector<double>& flat() const { return x_; }

 private:
  std::size_t k_ = 0;
  std::vector<double> x_;
};

enum class DynamicsMode { discrete, euler };

struct DynamicsConfig {
  int generations = 50;
  double tau = 1.0;
  // Additive constant applied to all fitnesses before the update so the
  // division by average fitness is well-defined (payoffs are <= 0). Empty
  // means auto: players * max|phi| + 1e-6.
  std::optional<double> fitness_shift;
  double stationarity_tol = 1e-8;
  DynamicsMode mode = DynamicsMode::discrete;
  // The default pipeline runs the full generation budget; stationarity is
  // still detected and reported. When set, iteration stops at the first
  // stationary generation.
  bool early_exit = false;
};

void validate_dynamics_config(const DynamicsConfig& cfg);

// X[i][j] = 1/(k-1) off the diagonal. Requires k >= 2.
PopulationState init_uniform_state(std::size_t k);

// Expected payoff of player i deterministically playing j while everyone
// else contributes their mixed state: the weight vector entry for model m is
// ([m == j] + sum_{p != i} X[p][m]) / k. Unshifted.
double strategy_fitness(const PopulationState& X, const EvalMatrix& phi,
                        std::size_t i, std::size_t j);

// sum_{j != i} X[i][j] * strategy_fitness(X, phi, i, j).
double average_fitness(const PopulationState& X, const EvalMatrix& phi, std::size_t i);

// The shift used when DynamicsConfig.fitness_shift is empty.
double auto_fitness_shift(const EvalMatrix& phi);

// One generation: X'[i][j] = X[i][j] * (1 + tau * (f_ij - fbar_i) / fbar_i)
// with shifted fitnesses f (discrete mode), or the forward-Euler form
// X + tau * X * (f - fbar) / fbar (euler mode; same value, different
// rounding). Rows are renormalized afterwards. Throws if any shifted fitness
// is not strictly positive (shift too small).
PopulationState replicator_step(const PopulationState& X, const EvalMatrix& phi,
                                const DynamicsConfig& cfg);

// True iff max over (i, j != i) of |X[i][j] * (f_ij - fbar_i)| <= tol, with
// unshifted fitnesses; additive shifts cancel in f - fbar, so this is
// shift-independent.
bool is_stationary(const PopulationState& X, const EvalMatrix& phi, double tol);

// omega[m] = (1/k) * sum_i X[i][m], entries below 1e-15 clamped to zero,
// then renormalized. The degenerate k == 1 state maps to omega = (1).
WeightVector weights_from_state(const PopulationState& X);

// Approximate-equilibrium check: for every player, the best pure strategy's
// fitness exceeds the state's average fitness by at most tol (no unilateral
// deviation gains more than tol). Unshifted fitnesses.
bool verify_msne(const PopulationState& X, const EvalMatrix& phi, double tol);

struct SolveResult {
  PopulationState state;
  WeightVector weights;
  int generations_run = 0;
  // First generation at which the state tested stationary, if any.
  std::optional<int> stationary_at;
};

// Full pipeline on client updates: k == 1 returns omega = (1); k == 2 skips
// the game (both players have a single legal strategy) and returns
// omega = (1/2, 1/2); k >= 3 builds the evaluation matrix and iterates the
// replicator from the uniform state. Deterministic and rng-free.
SolveResult solve(const std::vector<ParamVector>& models, const DynamicsConfig& cfg);

// Same iteration on an already-built evaluation matrix.
SolveResult solve_matrix(const EvalMatrix& phi, const DynamicsConfig& cfg);

}  // namespace gtflat
