#include "gtflat/game.hpp"

#include <cmath>
#include <stdexcept>

namespace gtflat {

EvalMatrix::EvalMatrix(std::size_t k, std::vector<double> entries)
    : k_(k), phi_(std::move(entries)) {
  if (k_ < 2) throw std::invalid_argument("EvalMatrix: need at least 2 players");
  if (phi_.size() != k_ * k_) {
    throw std::invalid_argument("EvalMatrix: entry count does not match k*k");
  }
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) {
      double v = phi_[i * k_ + j];
      if (!std::isfinite(v)) throw std::invalid_argument("EvalMatrix: non-finite entry");
      if (i == j && v != 0.0) {
        throw std::invalid_argument("EvalMatrix: diagonal must be exactly zero");
      }
      if (i != j && v > 0.0) {
        throw std::invalid_argument("EvalMatrix: off-diagonal entries must be <= 0");
      }
      if (v != phi_[j * k_ + i]) {
        throw std::invalid_argument("EvalMatrix: matrix must be exactly symmetric");
      }
    }
  }
}

EvalMatrix build_eval_matrix(const std::vector<ParamVector>& models) {
  if (models.size() < 2) {
    throw std::invalid_argument("build_eval_matrix: need at least 2 models");
  }
  std::size_t k = models.size();
  std::vector<double> phi(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double d = -pairwise_distance(models[i], models[j]);
      phi[i * k + j] = d;
      phi[j * k + i] = d;  // assign both triangles from one value: exact symmetry
    }
  }
  return EvalMatrix(k, std::move(phi));
}

StrategyProfile::StrategyProfile(std::vector<std::size_t> choices) : s_(std::move(choices)) {
  if (s_.empty()) throw std::invalid_argument("StrategyProfile: empty profile");
  for (std::size_t i = 0; i < s_.size(); ++i) {
    if (s_[i] >= s_.size()) {
      throw std::invalid_argument("StrategyProfile: choice out of range");
    }
    if (s_[i] == i) {
      throw std::invalid_argument("StrategyProfile: self-selection is illegal");
    }
  }
}

WeightVector weights_from_profile(const StrategyProfile& p) {
  std::size_t k = p.size();
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < k; ++i) counts[p.at(i)] += 1;
  std::vector<double> w(k);
  for (std::size_t m = 0; m < k; ++m) w[m] = static_cast<double>(counts[m]) / static_cast<double>(k);
  return WeightVector(std::move(w));
}

double payoff(const WeightVector& omega, const EvalMatrix& phi, std::size_t player) {
  if (omega.size() != phi.players()) {
    throw std::invalid_argument("payoff: weight length does not match player count");
  }
  if (player >= phi.players()) {
    throw std::invalid_argument("payoff: player index out of range");
  }
  double u = 0.0;
  for (std::size_t m = 0; m < phi.players(); ++m) {
    u += omega.at(m) * phi.at(m, player);
  }
  return u;
}

namespace {

// Walk all legal profiles in lexicographic order of the choice vector.
template <typename Fn>
void for_each_profile(std::size_t k, Fn&& fn) {
  std::vector<std::size_t> s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = (i == 0) ? 1 : 0;
  while (true) {
    fn(s);
    // increment like an odometer, skipping self-selections
    std::size_t i = k;
    while (i > 0) {
      --i;
      std::size_t next = s[i] + 1;
      if (next == i) ++next;
      if (next < k) {
        s[i] = next;
        for (std::size_t j = i + 1; j < k; ++j) s[j] = (j == 0) ? 1 : 0;
        break;
      }
      if (i == 0) return;
    }
  }
}

void check_table_size(std::size_t k) {
  if (k > 8) throw std::invalid_argument("payoff table enumeration limited to k <= 8");
}

}  // namespace

std::map<std::vector<std::size_t>, std::vector<double>> enumerate_payoff_table(
    const EvalMatrix& phi) {
  check_table_size(phi.players());
  std::size_t k = phi.players();
  std::map<std::vector<std::size_t>, std::vector<double>> table;
  for_each_profile(k, [&](const std::vector<std::size_t>& s) {
    WeightVector w = weights_from_profile(StrategyProfile(s));
    std::vector<double> u(k);
    for (std::size_t i = 0; i < k; ++i) u[i] = payoff(w, phi, i);
    table.emplace(s, std::move(u));
  });
  return table;
}

std::vector<StrategyProfile> find_pure_nash(const EvalMatrix& phi) {
  check_table_size(phi.players());
  std::size_t k = phi.players();
  std::vector<StrategyProfile> result;
  for_each_profile(k, [&](const std::vector<std::size_t>& s) {
    std::vector<std::size_t> trial = s;
    for (std::size_t i = 0; i < k; ++i) {
      double base_u = payoff(weights_from_profile(StrategyProfile(s)), phi, i);
      for (std::size_t a = 0; a < k; ++a) {
        if (a == i || a == s[i]) continue;
        trial[i] = a;
        double dev_u = payoff(weights_from_profile(StrategyProfile(trial)), phi, i);
        if (dev_u > base_u + 1e-12) {
          trial[i] = s[i];
          return;  // profitable deviation: not an equilibrium
        }
      }
      trial[i] = s[i];
    }
    result.emplace_back(s);
  });
  return result;
}

}  // namespace gtflat
