#include "mex/harness.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace mex;
namespace fs = std::filesystem;

namespace {

HypothesisClass model_class(const EpisodicMDP& env, int n, std::uint64_t seed) {
  TabularClassOptions options;
  options.n_members = n;
  options.perturbation = 0.35;
  options.seed = seed;
  return enumerate_tabular_model_class(env, options);
}

nlohmann::json small_config(int episodes, std::uint64_t seed) {
  nlohmann::json config;
  config["env"] = {{"kind", "random_mdp"}, {"n_states", 4}, {"n_actions", 2},
                   {"horizon", 3},         {"seed", 5},     {"sparsity", 0.4}};
  config["class"] = {{"kind", "tabular"}, {"n_members", 8}, {"perturbation", 0.4}, {"seed", 7}};
  config["algo"] = {{"name", "mex"}, {"episodes", episodes}, {"eta", 0.1}, {"seed", seed}};
  return config;
}

}  // namespace

TEST_CASE("regret recomputation matches the logged run") {
  const EpisodicMDP env = make_random_tabular_mdp(4, 2, 4, 606, 0.4);
  const HypothesisClass cls = model_class(env, 10, 3);
  MexConfig cfg;
  cfg.eta = 0.1;
  cfg.episodes = 80;
  cfg.seed = 4;
  const RunLog log = run_mex_mdp(env, cls, cfg);
  const RegretCurve curve = compute_regret(log, env);
  REQUIRE(curve.gaps.size() == 80);
  for (int i = 0; i < 80; ++i) {
    CHECK(std::abs(curve.gaps(i) - log.records[i].gap) <= 1e-10);
    CHECK(std::abs(curve.cumulative(i) - log.records[i].cum_regret) <= 1e-10);
  }
}

TEST_CASE("all-optimal logs give an all-zero curve; one episode gives one gap") {
  const EpisodicMDP env = make_random_tabular_mdp(3, 2, 3, 9, 0.4);
  const HypothesisClass truth_only = model_class(env, 1, 1);
  MexConfig cfg;
  cfg.eta = 0.1;
  cfg.episodes = 60;
  cfg.seed = 2;
  const RunLog log = run_mex_mdp(env, truth_only, cfg);
  const RegretCurve curve = compute_regret(log, env);
  CHECK(curve.cumulative.cwiseAbs().maxCoeff() <= 1e-10);

  cfg.episodes = 1;
  const RunLog single = run_mex_mdp(env, model_class(env, 6, 2), cfg);
  const RegretCurve single_curve = compute_regret(single, env);
  REQUIRE(single_curve.gaps.size() == 1);
  CHECK(single_curve.cumulative(0) == single_curve.gaps(0));
}

TEST_CASE("power-law fit recovers planted exponents") {
  const int K = 400;
  VectorXd half(K), linear(K);
  for (int k = 1; k <= K; ++k) {
    half(k - 1) = std::sqrt(static_cast<double>(k));
    linear(k - 1) = static_cast<double>(k);
  }
  const PowerLawFit fit_half = fit_power_law(half);
  CHECK(fit_half.exponent == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fit_half.coefficient == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit_half.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  const PowerLawFit fit_linear = fit_power_law(linear);
  CHECK(fit_linear.exponent == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit_linear.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("power-law fit tolerates noise around 3 k^0.6") {
  const int K = 2000;
  Rng rng(12);
  VectorXd curve(K);
  for (int k = 1; k <= K; ++k) {
    curve(k - 1) = 3.0 * std::pow(static_cast<double>(k), 0.6) + 0.01 * rng.normal();
  }
  const PowerLawFit fit = fit_power_law(curve);
  CHECK(fit.exponent >= 0.55);
  CHECK(fit.exponent <= 0.65);
  CHECK(fit.r_squared >= 0.99);
}

TEST_CASE("degenerate all-zero curves are flagged") {
  const VectorXd zero = VectorXd::Zero(120);
  const PowerLawFit fit = fit_power_law(zero);
  CHECK(fit.degenerate);
  CHECK(fit.exponent == 0.0);
  CHECK(fit.n_dropped == 60);
  CHECK_THROWS_AS(fit_power_law(VectorXd::Zero(10)), std::invalid_argument);
}

TEST_CASE("eta schedule: unit plug-in and scaling law") {
  // all dimensions 1, |class| = e, delta chosen so the log term vanishes
  CHECK(eta_from_theory(1.0, 1, 1, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // doubling K while doubling delta keeps HK/delta fixed: eta shrinks by
  // exactly sqrt(2)
  const double base = eta_from_theory(3.7, 4, 900, 1.0, std::log(32.0), 0.05);
  const double doubled = eta_from_theory(3.7, 4, 1800, 1.0, std::log(32.0), 0.10);
  CHECK(doubled * std::sqrt(2.0) == doctest::Approx(base).epsilon(1e-14));
  CHECK_THROWS_AS(eta_from_theory(-1.0, 1, 1, 1.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("eta schedule: tabular benchmark plug-in matches the hand value") {
  const double d = d_proxy_tabular(5, 2, 5, 5000);
  CHECK(d == doctest::Approx(2129.2982978540595).epsilon(1e-12));
  const double eta =
      eta_from_theory(d, 5, 5000, loss_scale_model_based(), std::log(64.0), 0.05);
  CHECK(eta == doctest::Approx(0.07812620183709257).epsilon(1e-12));
}

TEST_CASE("epsilon = 1 behaves exactly like the uniform policy") {
  const EpisodicMDP env = make_random_tabular_mdp(3, 2, 3, 88, 0.4);
  const HypothesisClass cls = model_class(env, 4, 5);
  const RunLog log = baseline_epsilon_greedy(env, cls, 1.0, 40, 17);
  const PlanResult oracle = plan_optimal(env);
  const ValueTable uniform_value = policy_evaluation(env, uniform_policy(3, 3, 2));
  const double expected_gap =
      oracle.values.V[0](env.initial_state()) - uniform_value.V[0](env.initial_state());
  for (const EpisodeRecord& r : log.records) {
    CHECK(r.gap == doctest::Approx(expected_gap).epsilon(1e-10));
  }
}

TEST_CASE("epsilon = 0 with the singleton true class has zero regret") {
  const EpisodicMDP env = make_random_tabular_mdp(3, 2, 3, 18, 0.4);
  const HypothesisClass cls = model_class(env, 1, 2);
  const RunLog log = baseline_epsilon_greedy(env, cls, 0.0, 30, 3);
  CHECK(std::abs(log.final_cum_regret()) <= 1e-8);
}

TEST_CASE("run artifacts round-trip through the loader") {
  const EpisodicMDP env = make_random_tabular_mdp(3, 2, 3, 55, 0.4);
  const HypothesisClass cls = model_class(env, 6, 6);
  MexConfig cfg;
  cfg.eta = 0.2;
  cfg.episodes = 25;
  cfg.seed = 12;
  const RunLog log = run_mex_mdp(env, cls, cfg);
  const std::string dir = (fs::temp_directory_path() / "mex_artifacts_roundtrip").string();
  fs::remove_all(dir);
  write_run_artifacts(log, to_text(env), to_text(cls), dir);
  const RunLog back = load_runlog(dir);
  REQUIRE(back.records.size() == log.records.size());
  REQUIRE(back.episodes.size() == log.episodes.size());
  for (size_t i = 0; i < log.records.size(); ++i) {
    CHECK(back.records[i].f_index == log.records[i].f_index);
    CHECK(back.records[i].gap == log.records[i].gap);
    CHECK(back.records[i].cum_regret == log.records[i].cum_regret);
  }
  for (size_t i = 0; i < log.episodes.size(); ++i) {
    REQUIRE(back.episodes[i].steps.size() == log.episodes[i].steps.size());
    for (size_t h = 0; h < log.episodes[i].steps.size(); ++h) {
      CHECK(back.episodes[i].steps[h].state == log.episodes[i].steps[h].state);
      CHECK(back.episodes[i].steps[h].action == log.episodes[i].steps[h].action);
      CHECK(back.episodes[i].steps[h].reward == log.episodes[i].steps[h].reward);
      CHECK(back.episodes[i].steps[h].next_state == log.episodes[i].steps[h].next_state);
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("suite reruns are byte-identical") {
  const nlohmann::json config = small_config(40, 9);
  const std::string dir_a = (fs::temp_directory_path() / "mex_suite_a").string();
  const std::string dir_b = (fs::temp_directory_path() / "mex_suite_b").string();
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  run_suite(config, dir_a);
  run_suite(config, dir_b);
  // rerun in place as well: the oracle cache is reused the second time
  run_suite(config, dir_a);
  for (const char* name :
       {"eta0_seed0/regret.csv", "eta0_seed0/runlog.csv", "eta0_seed0/episodes.csv",
        "eta0_seed0/ledger.csv", "summary.json", "oracle.json"}) {
    const std::string a = load_text((fs::path(dir_a) / name).string());
    const std::string b = load_text((fs::path(dir_b) / name).string());
    CHECK(a == b);
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("unknown config keys are rejected with their location") {
  nlohmann::json config = small_config(10, 1);
  config["algo"]["learning_rate"] = 0.5;
  const std::string dir = (fs::temp_directory_path() / "mex_suite_bad").string();
  CHECK_THROWS_WITH_AS(run_suite(config, dir),
                       "config error at [algo]: unknown key 'learning_rate'",
                       std::invalid_argument);
  nlohmann::json top = small_config(10, 1);
  top["extra_section"] = 1;
  CHECK_THROWS_AS(run_suite(top, dir), std::invalid_argument);
}

TEST_CASE("eta sweep produces one artifact cell per grid point") {
  nlohmann::json config = small_config(60, 0);
  config["sweep"] = {{"etas", {0.01, 0.1}}, {"seeds", {1, 2}}};
  const std::string dir = (fs::temp_directory_path() / "mex_suite_sweep").string();
  fs::remove_all(dir);
  const SuiteResult result = run_suite(config, dir);
  CHECK(result.report.at("cells").size() == 4);
  for (int e = 0; e < 2; ++e) {
    for (int s = 0; s < 2; ++s) {
      const std::string cell =
          (fs::path(dir) / ("eta" + std::to_string(e) + "_seed" + std::to_string(s))).string();
      CHECK(fs::exists(fs::path(cell) / "regret.csv"));
      CHECK(fs::exists(fs::path(cell) / "ledger.csv"));
    }
  }
  CHECK(fs::exists(fs::path(dir) / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("gridworld benchmark: MEX reaches the goal, the baseline stays put") {
  const GridworldBenchmark bench = run_gridworld_benchmark(1, 250, 50);
  CHECK(bench.mex_mean_return > 9.0);
  CHECK(bench.baseline_mean_return < bench.mex_mean_return);
}
