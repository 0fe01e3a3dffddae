#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gtflat/data_gen.hpp"
#include "gtflat/param_space.hpp"

namespace gtflat {

// Per-round test accuracies; values[r-1] holds round r (rounds are 1-based).
using AccuracySeries = std::vector<double>;

// Fraction of rows whose argmax class score equals the label; score ties
// break toward the lowest class index.
double top1_accuracy(const ParamVector& p, const Dataset& ds);

// out[r] = max(s[0..r]); non-decreasing, pointwise >= s.
AccuracySeries cumulative_max(const AccuracySeries& s);

// Smallest 1-based round r with s[r] >= target - eps; empty if no round
// qualifies. First crossing is invariant under cumulative_max.
std::optional<std::size_t> effective_round(const AccuracySeries& s, double target, double eps);

// Relative round-efficiency of series `candidate` against `baseline` at the
// baseline's round-r accuracy: (1 - R_candidate/R_baseline) * 100. Positive
// means the candidate needed fewer rounds. Empty when either series never
// reaches the target.
std::optional<double> erir(const AccuracySeries& candidate, const AccuracySeries& baseline,
                           std::size_t round, double eps);

}  // namespace gtflat
