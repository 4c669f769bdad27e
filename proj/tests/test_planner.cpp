#include "mex/planner.hpp"

#include "mex/envs.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace mex;

TEST_CASE("backup boundary: zero continuation returns the reward slice") {
  const EpisodicMDP env = make_random_tabular_mdp(3, 2, 2, 4, 0.5);
  const MatrixXd q = bellman_optimality_backup(MatrixXd::Zero(3, 2), env, 1);
  CHECK((q - env.reward(1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unit rewards make Q_h = H - h everywhere") {
  const int H = 4;
  const EpisodicMDP env = EpisodicMDP::stationary(
      H, 2, 2, (MatrixXd(4, 2) << 0.3, 0.7, 0.6, 0.4, 0.2, 0.8, 0.9, 0.1).finished(),
      MatrixXd::Ones(2, 2), 0);
  const PlanResult plan = plan_optimal(env);
  for (int h = 0; h < H; ++h) {
    CHECK((plan.values.Q[h].array() - (H - h)).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("backup matches brute force on a 2x2x2 instance") {
  const EpisodicMDP env = make_random_tabular_mdp(2, 2, 2, 15, 0.6);
  const PlanResult plan = plan_optimal(env);
  CHECK(plan.values.V[0](env.initial_state()) ==
        doctest::Approx(testing::brute_force_optimal_value(env)).epsilon(1e-12));
}

TEST_CASE("plan_optimal equals evaluation when one action exists") {
  const EpisodicMDP env = make_random_tabular_mdp(4, 1, 3, 21, 0.5);
  const PlanResult plan = plan_optimal(env);
  const ValueTable table = policy_evaluation(env, uniform_policy(3, 4, 1));
  for (int h = 0; h <= 3; ++h) {
    CHECK((plan.values.V[h] - table.V[h]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("plan_optimal matches policy enumeration on random 3x2x3 instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EpisodicMDP env = make_random_tabular_mdp(3, 2, 3, 500 + seed, 0.4);
    const PlanResult plan = plan_optimal(env);
    CHECK(std::abs(plan.values.V[0](env.initial_state()) -
                   testing::brute_force_optimal_value(env)) < 1e-10);
  }
}

TEST_CASE("planner output is a Bellman fixed point") {
  const EpisodicMDP env = make_random_tabular_mdp(4, 3, 4, 33, 0.4);
  const PlanResult plan = plan_optimal(env);
  for (int h = 0; h < 4; ++h) {
    const MatrixXd q_next = h + 1 < 4 ? plan.values.Q[h + 1] : MatrixXd::Zero(4, 3);
    const MatrixXd redo = bellman_optimality_backup(q_next, env, h);
    CHECK((redo - plan.values.Q[h]).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("planner values stay within the remaining horizon") {
  const EpisodicMDP env = make_random_tabular_mdp(3, 2, 5, 81, 0.7);
  const PlanResult plan = plan_optimal(env);
  for (int h = 0; h <= 5; ++h) {
    CHECK(plan.values.V[h].minCoeff() >= -1e-12);
    CHECK(plan.values.V[h].maxCoeff() <= 5 - h + 1e-12);
  }
}

TEST_CASE("matrix game: 1x1") {
  MatrixXd m(1, 1);
  m << 0.37;
  const MatrixGameSolution sol = solve_matrix_game(m);
  CHECK(sol.value == 0.37);
  CHECK(sol.row_strategy(0) == 1.0);
  CHECK(sol.col_strategy(0) == 1.0);
  CHECK(sol.duality_gap == 0.0);
}

TEST_CASE("matrix game: rock-paper-scissors is uniform with value zero") {
  MatrixXd m(3, 3);
  m << 0, -1, 1, 1, 0, -1, -1, 1, 0;
  const MatrixGameSolution sol = solve_matrix_game(m);
  CHECK(sol.value == 0.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(sol.row_strategy(i) == 1.0 / 3.0);
    CHECK(sol.col_strategy(i) == 1.0 / 3.0);
  }
  CHECK(sol.duality_gap <= 1e-15);
}

TEST_CASE("matrix game: known 2x2 mixed equilibrium") {
  MatrixXd m(2, 2);
  m << 3, 1, 0, 2;
  const MatrixGameSolution sol = solve_matrix_game(m);
  CHECK(sol.value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sol.row_strategy(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.row_strategy(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.col_strategy(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(sol.col_strategy(1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(sol.duality_gap <= 1e-12);
}

TEST_CASE("matrix game: random instances have certified gaps") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int a = 1 + static_cast<int>(rng.uniform() * 10);
    const int b = 1 + static_cast<int>(rng.uniform() * 10);
    MatrixXd m(a, b);
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < b; ++j) {
        m(i, j) = 10.0 * rng.uniform() - 5.0;
      }
    }
    const MatrixGameSolution sol = solve_matrix_game(m);
    CHECK(sol.duality_gap >= -1e-15);
    CHECK(sol.duality_gap <= 1e-8);
    CHECK(sol.row_strategy.minCoeff() >= 0.0);
    CHECK(sol.col_strategy.minCoeff() >= 0.0);
    CHECK(sol.row_strategy.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.col_strategy.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("matrix game: identical input gives identical output") {
  Rng rng(5);
  MatrixXd m(4, 6);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 6; ++j) {
      m(i, j) = rng.uniform();
    }
  }
  const MatrixGameSolution s1 = solve_matrix_game(m);
  const MatrixGameSolution s2 = solve_matrix_game(m);
  CHECK(s1.value == s2.value);
  CHECK(s1.row_strategy == s2.row_strategy);
  CHECK(s1.col_strategy == s2.col_strategy);
}

TEST_CASE("matrix game rejects non-finite entries") {
  MatrixXd m(2, 2);
  m << 1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  CHECK_THROWS_AS(solve_matrix_game(m), std::invalid_argument);
}

TEST_CASE("minimax exchange: swapping players negates the value") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int a = 2 + static_cast<int>(rng.uniform() * 5);
    const int b = 2 + static_cast<int>(rng.uniform() * 5);
    MatrixXd m(a, b);
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < b; ++j) {
        m(i, j) = 4.0 * rng.uniform() - 2.0;
      }
    }
    const MatrixGameSolution direct = solve_matrix_game(m);
    const MatrixGameSolution swapped = solve_matrix_game((-m).transpose());
    CHECK(std::abs(direct.value + swapped.value) <= 2e-8);
  }
}

TEST_CASE("equilibrium value iteration: H = 1 reduces to stage games") {
  const ZeroSumMG mg = make_random_tabular_mg(3, 2, 2, 1, 6);
  const NePlanResult plan = ne_value_iteration(mg);
  for (int s = 0; s < 3; ++s) {
    MatrixXd stage(2, 2);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        stage(a, b) = mg.reward_at(0, s, a, b);
      }
    }
    const MatrixGameSolution sol = solve_matrix_game(stage);
    CHECK(plan.values.V[0](s) == doctest::Approx(sol.value).epsilon(1e-12));
  }
}

TEST_CASE("degenerate game with B = 1 equals MDP planning") {
  const ZeroSumMG mg = make_random_tabular_mg(3, 2, 1, 3, 17);
  std::vector<MatrixXd> t, r;
  for (int h = 0; h < 3; ++h) {
    t.push_back(mg.transition(h));
    r.push_back(mg.reward(h));
  }
  const EpisodicMDP induced(3, 3, 2, t, r, 0);
  const NePlanResult ne = ne_value_iteration(mg);
  const PlanResult plan = plan_optimal(induced);
  for (int h = 0; h <= 3; ++h) {
    CHECK((ne.values.V[h] - plan.values.V[h]).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("equilibrium value matches the induced normal form on small games") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ZeroSumMG mg = make_random_tabular_mg(3, 2, 2, 2, 900 + seed);
    const NePlanResult plan = ne_value_iteration(mg);
    const MatrixXd normal_form = testing::induced_normal_form(mg);
    const MatrixGameSolution sol = solve_matrix_game(normal_form);
    CHECK(std::abs(plan.values.V[0](mg.initial_state()) - sol.value) < 1e-8);
  }
}

TEST_CASE("best response against the equilibrium policy recovers the value") {
  const ZeroSumMG mg = make_random_tabular_mg(3, 2, 2, 3, 41);
  const NePlanResult ne = ne_value_iteration(mg);
  const BrPlanResult br = best_response_value_iteration(mg, ne.policy.max_policy);
  CHECK(std::abs(br.values.V[0](mg.initial_state()) - ne.values.V[0](mg.initial_state())) <=
        1e-8);
}

TEST_CASE("best response with B = 1 is plain evaluation") {
  const ZeroSumMG mg = make_random_tabular_mg(2, 2, 1, 2, 52);
  const Policy mu = uniform_policy(2, 2, 2);
  const BrPlanResult br = best_response_value_iteration(mg, mu);
  const ValueTable table = policy_evaluation(mg, JointPolicy{mu, uniform_policy(2, 2, 1)});
  CHECK((br.values.V[0] - table.V[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("best response value equals the deterministic-response minimum") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ZeroSumMG mg = make_random_tabular_mg(2, 2, 2, 2, 700 + seed);
    Rng rng(seed);
    Policy mu = uniform_policy(2, 2, 2);
    for (int h = 0; h < 2; ++h) {
      for (int s = 0; s < 2; ++s) {
        const double u = rng.uniform();
        mu.prob[h](s, 0) = u;
        mu.prob[h](s, 1) = 1.0 - u;
      }
    }
    const BrPlanResult br = best_response_value_iteration(mg, mu);
    const double enumerated = testing::enumerate_best_response_value(mg, mu);
    CHECK(std::abs(br.values.V[0](mg.initial_state()) - enumerated) < 1e-10);

    const NePlanResult ne = ne_value_iteration(mg);
    CHECK(br.values.V[0](mg.initial_state()) <=
          ne.values.V[0](mg.initial_state()) + 1e-8);
  }
}
