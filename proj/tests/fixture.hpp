#pragma once

// The three-model reference fixture used throughout the test suite: pairwise
// update distances 0.53 (0-1), 0.55 (0-2), 0.37 (1-2). Small enough to check
// every payoff by hand; the golden table below is that hand arithmetic, kept
// as exact fractions over 3.

#include <map>
#include <vector>

#include "gtflat/dynamics.hpp"
#include "gtflat/game.hpp"

inline gtflat::EvalMatrix fixture_matrix() {
  return gtflat::EvalMatrix(3, {0.0, -0.53, -0.55,    //
                                -0.53, 0.0, -0.37,    //
                                -0.55, -0.37, 0.0});
}

// Expected per-player payoffs for all 8 legal pure profiles of the fixture.
inline std::map<std::vector<std::size_t>, std::vector<double>> fixture_payoff_table() {
  return {
      {{1, 0, 0}, {-0.53 / 3, -1.06 / 3, -1.47 / 3}},
      {{1, 0, 1}, {-1.06 / 3, -0.53 / 3, -1.29 / 3}},
      {{1, 2, 0}, {-1.08 / 3, -0.90 / 3, -0.92 / 3}},
      {{1, 2, 1}, {-1.61 / 3, -0.37 / 3, -0.74 / 3}},
      {{2, 0, 0}, {-0.55 / 3, -1.43 / 3, -1.10 / 3}},
      {{2, 0, 1}, {-1.08 / 3, -0.90 / 3, -0.92 / 3}},
      {{2, 2, 0}, {-1.10 / 3, -1.27 / 3, -0.55 / 3}},
      {{2, 2, 1}, {-1.63 / 3, -0.74 / 3, -0.37 / 3}},
  };
}

// Reference end state of the fixture's 50-generation run, rows in reading
// order with the structural-zero diagonal.
inline gtflat::PopulationState fixture_final_state() {
  return gtflat::PopulationState(3, {0.0, 0.50, 0.50,   //
                                     0.13, 0.0, 0.87,   //
                                     0.12, 0.88, 0.0});
}
