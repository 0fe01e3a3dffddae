#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fixture.hpp"
#include "gtflat/game.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace gtflat;

TEST_SUITE("game") {
  TEST_CASE("EvalMatrix enforces its invariants at construction") {
    CHECK_NOTHROW(fixture_matrix());
    // Broken symmetry.
    CHECK_THROWS_AS(EvalMatrix(2, {0.0, -1.0, -1.0 + 1e-6, 0.0}), std::invalid_argument);
    // Positive off-diagonal.
    CHECK_THROWS_AS(EvalMatrix(2, {0.0, 1.0, 1.0, 0.0}), std::invalid_argument);
    // Nonzero diagonal.
    CHECK_THROWS_AS(EvalMatrix(2, {1e-9, -1.0, -1.0, 0.0}), std::invalid_argument);
    // Too few players / wrong entry count.
    CHECK_THROWS_AS(EvalMatrix(1, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(EvalMatrix(2, {0.0, -1.0, -1.0}), std::invalid_argument);
  }

  TEST_CASE("build_eval_matrix on simple inputs") {
    ParamVector z({Layer{{1}, {0.0}}});
    EvalMatrix zero = build_eval_matrix({z, z});
    CHECK(zero.players() == 2);
    CHECK(zero.at(0, 1) == 0.0);
    CHECK(zero.at(1, 0) == 0.0);

    ParamVector a({Layer{{2}, {0.0, 0.0}}});
    ParamVector b({Layer{{2}, {3.0, 4.0}}});
    EvalMatrix phi = build_eval_matrix({a, b});
    CHECK(phi.at(0, 1) == doctest::Approx(-5.0).epsilon(1e-15));

    CHECK_THROWS_AS(build_eval_matrix({a}), std::invalid_argument);
    ParamVector other({Layer{{3}, {0.0, 0.0, 0.0}}});
    CHECK_THROWS_AS(build_eval_matrix({a, other}), std::invalid_argument);
  }

  TEST_CASE("StrategyProfile rejects self-selection and bad indices") {
    CHECK_NOTHROW(StrategyProfile({1, 0, 1}));
    CHECK_THROWS_AS(StrategyProfile({0, 0, 1}), std::invalid_argument);  // player 0 picks itself
    CHECK_THROWS_AS(StrategyProfile({3, 0, 1}), std::invalid_argument);  // out of range
    CHECK_THROWS_AS(StrategyProfile({}), std::invalid_argument);
  }

  TEST_CASE("weights_from_profile counts over k") {
    WeightVector w = weights_from_profile(StrategyProfile({1, 0, 1}));
    CHECK(w.get() == std::vector<double>{1.0 / 3.0, 2.0 / 3.0, 0.0});

    WeightVector perm = weights_from_profile(StrategyProfile({2, 0, 1}));
    CHECK(perm.get() == std::vector<double>{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});

    WeightVector two = weights_from_profile(StrategyProfile({1, 0}));
    CHECK(two.get() == std::vector<double>{0.5, 0.5});
  }

  TEST_CASE("weights_from_state on the reference final state") {
    WeightVector w = weights_from_state(fixture_final_state());
    CHECK(w.at(0) == doctest::Approx(0.25 / 3.0).epsilon(1e-12));
    CHECK(w.at(1) == doctest::Approx(1.38 / 3.0).epsilon(1e-12));
    CHECK(w.at(2) == doctest::Approx(1.37 / 3.0).epsilon(1e-12));

    WeightVector uniform = weights_from_state(init_uniform_state(3));
    for (std::size_t m = 0; m < 3; ++m) {
      CHECK(uniform.at(m) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }

    // Everyone who legally can picks model 0; player 0 picks model 1.
    PopulationState pure(3, {0.0, 1.0, 0.0,  //
                             1.0, 0.0, 0.0,  //
                             1.0, 0.0, 0.0});
    WeightVector counted = weights_from_state(pure);
    CHECK(counted.at(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(counted.at(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(counted.at(2) == 0.0);
  }

  TEST_CASE("payoff blends the selected column") {
    EvalMatrix phi = fixture_matrix();
    WeightVector w1 = weights_from_profile(StrategyProfile({1, 0, 0}));
    CHECK(payoff(w1, phi, 0) == doctest::Approx(-0.53 / 3.0).epsilon(1e-12));
    CHECK(payoff(w1, phi, 1) == doctest::Approx(-1.06 / 3.0).epsilon(1e-12));
    CHECK(payoff(w1, phi, 2) == doctest::Approx(-1.47 / 3.0).epsilon(1e-12));

    WeightVector w2 = weights_from_profile(StrategyProfile({2, 0, 1}));
    CHECK(payoff(w2, phi, 0) == doctest::Approx(-1.08 / 3.0).epsilon(1e-12));
    CHECK(payoff(w2, phi, 1) == doctest::Approx(-0.90 / 3.0).epsilon(1e-12));
    CHECK(payoff(w2, phi, 2) == doctest::Approx(-0.92 / 3.0).epsilon(1e-12));

    EvalMatrix zero(2, {0.0, 0.0, 0.0, 0.0});
    CHECK(payoff(WeightVector({0.3, 0.7}), zero, 0) == 0.0);
    CHECK(payoff(WeightVector({0.3, 0.7}), zero, 1) == 0.0);

    CHECK_THROWS_AS(payoff(WeightVector({1.0}), phi, 0), std::invalid_argument);
    CHECK_THROWS_AS(payoff(w1, phi, 3), std::invalid_argument);
  }

  TEST_CASE("enumerate_payoff_table reproduces the hand-computed table") {
    auto table = enumerate_payoff_table(fixture_matrix());
    auto want = fixture_payoff_table();
    REQUIRE(table.size() == 8);
    for (const auto& [profile, payoffs] : want) {
      auto it = table.find(profile);
      REQUIRE(it != table.end());
      REQUIRE(it->second.size() == 3);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(it->second[i] - payoffs[i]) <= 1e-12);
      }
    }
  }

  TEST_CASE("enumerate_payoff_table edge cases") {
    EvalMatrix two(2, {0.0, -1.0, -1.0, 0.0});
    auto table = enumerate_payoff_table(two);
    REQUIRE(table.size() == 1);
    CHECK(table.begin()->first == std::vector<std::size_t>{1, 0});

    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
      EvalMatrix phi = props::random_eval_matrix(rng, 3);
      auto random_table = enumerate_payoff_table(phi);
      CHECK(random_table.size() == 8);
      for (const auto& [profile, payoffs] : random_table) {
        WeightVector w = weights_from_profile(StrategyProfile(profile));
        for (std::size_t i = 0; i < 3; ++i) {
          double want = oracle::naive_payoff(w.get(), phi, i);
          CHECK(std::abs(payoffs[i] - want) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("find_pure_nash agrees with the brute-force deviation oracle") {
    // The fixture has a unique pure equilibrium: everyone picks their nearest
    // other model — (1, 2, 1).
    auto nash = find_pure_nash(fixture_matrix());
    REQUIRE(nash.size() == 1);
    CHECK(nash[0].choices() == std::vector<std::size_t>{1, 2, 1});

    EvalMatrix zero3(3, std::vector<double>(9, 0.0));
    CHECK(find_pure_nash(zero3).size() == 8);  // constant payoffs: everything is Nash

    EvalMatrix two(2, {0.0, -1.0, -1.0, 0.0});
    auto forced = find_pure_nash(two);
    REQUIRE(forced.size() == 1);
    CHECK(forced[0].choices() == std::vector<std::size_t>{1, 0});

    std::mt19937_64 rng(9);
    for (int t = 0; t < 100; ++t) {
      std::size_t k = std::uniform_int_distribution<std::size_t>(3, 4)(rng);
      EvalMatrix phi = props::random_eval_matrix(rng, k);
      auto found = find_pure_nash(phi);
      std::size_t oracle_count = 0;
      for (const auto& [profile, payoffs] : enumerate_payoff_table(phi)) {
        bool is_nash = oracle::is_pure_nash_by_deviation(profile, phi);
        if (is_nash) ++oracle_count;
        bool reported = false;
        for (const auto& p : found) {
          if (p.choices() == profile) reported = true;
        }
        CHECK(reported == is_nash);
      }
      CHECK(found.size() == oracle_count);
    }
  }

  TEST_CASE("payoffs are invariant under transposing the symmetric matrix") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 50; ++t) {
      std::size_t k = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
      EvalMatrix phi = props::random_eval_matrix(rng, k);
      std::vector<double> transposed(k * k);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) transposed[j * k + i] = phi.at(i, j);
      }
      EvalMatrix phi_t(k, transposed);
      for (const auto& [profile, payoffs] : enumerate_payoff_table(phi)) {
        WeightVector w = weights_from_profile(StrategyProfile(profile));
        for (std::size_t i = 0; i < k; ++i) {
          CHECK(payoff(w, phi, i) == payoff(w, phi_t, i));
        }
      }
    }
  }

  TEST_CASE("scaling all models by c > 0 scales payoffs and preserves equilibria") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 50; ++t) {
      auto models = props::random_models(rng, 3);
      double c = std::uniform_real_distribution<double>(0.1, 25.0)(rng);
      std::vector<ParamVector> scaled = models;
      for (ParamVector& m : scaled) {
        for (std::size_t l = 0; l < m.layer_count(); ++l) {
          for (double& v : m.values(l)) v *= c;
        }
      }
      EvalMatrix phi = build_eval_matrix(models);
      EvalMatrix phi_c = build_eval_matrix(scaled);
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          CHECK(std::abs(phi_c.at(i, j) - c * phi.at(i, j)) <=
                1e-9 * std::max(1.0, std::abs(c * phi.at(i, j))));
        }
      }
      auto nash = find_pure_nash(phi);
      auto nash_c = find_pure_nash(phi_c);
      REQUIRE(nash.size() == nash_c.size());
      for (std::size_t p = 0; p < nash.size(); ++p) {
        CHECK(nash[p].choices() == nash_c[p].choices());
      }
    }
  }
}
