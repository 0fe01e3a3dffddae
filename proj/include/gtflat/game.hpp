#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "gtflat/param_space.hpp"

namespace gtflat {

// Symmetric k x k matrix of negated pairwise model distances: diagonal
// exactly zero, off-diagonal entries finite and <= 0. The payoff kernel of
// the aggregation game. Requires k >= 2.
class EvalMatrix {
 public:
  EvalMatrix(std::size_t k, std::vector<double> entries);

  std::size_t players() const { return k_; }
  double at(std::size_t i, std::size_t j) const { return phi_[i * k_ + j]; }

 private:
  std::size_t k_ = 0;
  std::vector<double> phi_;
};

// phi[i][j] = -pairwise_distance(models[i], models[j]) for i != j.
EvalMatrix build_eval_matrix(const std::vector<ParamVector>& models);

// One chosen model index per player. Picking your own index is illegal and
// rejected on construction.
class StrategyProfile {
 public:
  explicit StrategyProfile(std::vector<std::size_t> choices);

  std::size_t size() const { return s_.size(); }
  std::size_t at(std::size_t i) const { return s_.at(i); }
  const std::vector<std::size_t>& choices() const { return s_; }

 private:
  std::vector<std::size_t> s_;
};

// omega[m] = (number of players choosing m) / k.
WeightVector weights_from_profile(const StrategyProfile& p);

// u_i = sum_m omega[m] * phi[m][i]: the blended distance score of model i
// under aggregation weights omega. Always <= 0.
double payoff(const WeightVector& omega, const EvalMatrix& phi, std::size_t player);

// Per-player payoff tuple for every legal pure profile, keyed by the choice
// vector in lexicographic order. Guarded to k <= 8 ((k-1)^k entries).
std::map<std::vector<std::size_t>, std::vector<double>> enumerate_payoff_table(
    const EvalMatrix& phi);

// Pure profiles where no player can improve their payoff by more than 1e-12
// through a unilateral switch. Guarded to k <= 8.
std::vector<StrategyProfile> find_pure_nash(const EvalMatrix& phi);

}  // namespace gtflat
