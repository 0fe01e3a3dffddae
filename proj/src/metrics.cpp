#include "gtflat/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include "gtflat/model.hpp"

namespace gtflat {

double top1_accuracy(const ParamVector& p, const Dataset& ds) {
  validate_dataset(ds);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < ds.n; ++r) {
    std::vector<double> z = model_scores(p, ds, r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
      if (z[c] > z[best]) best = c;  // strict: ties keep the lower index
    }
    if (best == static_cast<std::size_t>(ds.labels[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.n);
}

AccuracySeries cumulative_max(const AccuracySeries& s) {
  if (s.empty()) throw std::invalid_argument("cumulative_max: empty series");
  AccuracySeries out(s.size());
  double running = s[0];
  for (std::size_t r = 0; r < s.size(); ++r) {
    running = std::max(running, s[r]);
    out[r] = running;
  }
  return out;
}

std::optional<std::size_t> effective_round(const AccuracySeries& s, double target, double eps) {
  if (s.empty()) throw std::invalid_argument("effective_round: empty series");
  if (eps < 0.0) throw std::invalid_argument("effective_round: eps must be >= 0");
  for (std::size_t r = 0; r < s.size(); ++r) {
    if (s[r] >= target - eps) return r + 1;
  }
  return std::nullopt;
}

std::optional<double> erir(const AccuracySeries& candidate, const AccuracySeries& baseline,
                           std::size_t round, double eps) {
  if (round < 1 || round > baseline.size()) {
    throw std::invalid_argument("erir: round outside the baseline series");
  }
  double target = baseline[round - 1];
  std::optional<std::size_t> r_cand = effective_round(candidate, target, eps);
  std::optional<std::size_t> r_base = effective_round(baseline, target, eps);
  if (!r_cand || !r_base) return std::nullopt;
  return (1.0 - static_cast<double>(*r_cand) / static_cast<double>(*r_base)) * 100.0;
}

}  // namespace gtflat
