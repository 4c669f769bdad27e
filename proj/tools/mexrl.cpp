// Command-line front end: seeded experiment runs, eta sweeps, the gridworld
// head-to-head, artifact verification, and environment generation.

#include "mex/diagnostics.hpp"
#include "mex/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) {
    return nlohmann::json::object();
  }
  return nlohmann::json::parse(mex::load_text(path));
}

int run_config_command(const std::string& config_path, const std::string& out_dir,
                       std::uint64_t seed, bool seed_set, bool game_expected) {
  nlohmann::json config = load_config(config_path);
  if (seed_set) {
    config["algo"]["seed"] = seed;
  }
  if (config.contains("env") && config.contains("algo")) {
    const std::string kind = config["env"].value("kind", "");
    if (kind != "file") {  // file-based environments declare their own type
      const bool is_game = kind == "random_mg" || kind == "linear_mixture_mg";
      if (is_game != game_expected) {
        std::cerr << "config env kind '" << kind << "' does not match the subcommand\n";
        return 2;
      }
    }
  }
  const mex::SuiteResult result = mex::run_suite(config, out_dir);
  std::cout << "artifacts written to " << out_dir << "\n";
  std::cout << (result.passed ? "PASS" : "FAIL") << "\n";
  return result.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximize-to-explore online RL experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config with [env]/[class]/[algo] sections");
    cmd->add_option("--out", out_dir, "artifact directory");
    cmd->add_option("--seed", seed, "override the run seed")->each([&](const std::string&) {
      seed_set = true;
    });
  };

  CLI::App* run_mdp = app.add_subcommand("run-mdp", "run on an episodic MDP");
  add_common(run_mdp);

  CLI::App* run_mg = app.add_subcommand("run-mg", "run self-play on a zero-sum game");
  add_common(run_mg);

  CLI::App* sweep = app.add_subcommand("sweep-eta", "grid of eta values and seeds");
  add_common(sweep);

  CLI::App* grid = app.add_subcommand("gridworld", "gridworld head-to-head vs eps-greedy");
  add_common(grid);
  int episodes = 1000;
  grid->add_option("--episodes", episodes, "episode budget");

  CLI::App* verify = app.add_subcommand("verify", "diagnostics over an artifact directory");
  std::string artifact_dir;
  verify->add_option("--out", artifact_dir, "artifact directory to verify")->required();
  double delta = 0.05;
  verify->add_option("--delta", delta, "confidence parameter");

  CLI::App* make_env = app.add_subcommand("make-env", "generate and dump an environment");
  std::string env_kind = "gridworld";
  std::string env_out = "env.json";
  int S = 5, A = 2, B = 2, H = 5, d = 3;
  double sparsity = 0.2;
  make_env->add_option("--kind", env_kind, "gridworld|random-mdp|random-mg|linear-mixture-mg");
  make_env->add_option("--out", env_out, "output file");
  make_env->add_option("--seed", seed, "generator seed");
  make_env->add_option("--n-states", S, "state count");
  make_env->add_option("--n-actions", A, "max-player action count");
  make_env->add_option("--n-min-actions", B, "min-player action count");
  make_env->add_option("--horizon", H, "horizon");
  make_env->add_option("--d", d, "mixture dimension");
  make_env->add_option("--sparsity", sparsity, "reward sparsity");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_mdp->parsed()) {
      return run_config_command(config_path, out_dir, seed, seed_set, false);
    }
    if (run_mg->parsed()) {
      return run_config_command(config_path, out_dir, seed, seed_set, true);
    }
    if (sweep->parsed()) {
      nlohmann::json config = load_config(config_path);
      if (!config.contains("sweep")) {
        std::cerr << "sweep-eta requires a [sweep] section\n";
        return 2;
      }
      if (seed_set) {
        config["algo"]["seed"] = seed;
      }
      const mex::SuiteResult result = mex::run_suite(config, out_dir);
      std::cout << "artifacts written to " << out_dir << "\n";
      return result.passed ? 0 : 1;
    }
    if (grid->parsed()) {
      const mex::GridworldBenchmark bench = mex::run_gridworld_benchmark(seed, episodes);
      fs::create_directories(out_dir);
      const mex::EpisodicMDP env = mex::make_gridworld();
      const std::string env_text = mex::to_text(env);
      mex::write_run_artifacts(bench.mex_log, env_text, "", (fs::path(out_dir) / "mex").string());
      mex::write_run_artifacts(bench.baseline_log, env_text, "",
                               (fs::path(out_dir) / "eps_greedy").string());
      nlohmann::json summary;
      summary["seed"] = seed;
      summary["episodes"] = episodes;
      summary["window"] = bench.window;
      summary["mex_mean_return_unscaled"] = bench.mex_mean_return;
      summary["eps_greedy_mean_return_unscaled"] = bench.baseline_mean_return;
      summary["mex_beats_baseline"] = bench.mex_mean_return > bench.baseline_mean_return;
      mex::save_text((fs::path(out_dir) / "summary.json").string(), summary.dump(2));
      std::cout << "mex mean return (unscaled, last " << bench.window
                << "): " << bench.mex_mean_return << "\n";
      std::cout << "eps-greedy mean return (unscaled): " << bench.baseline_mean_return << "\n";
      return 0;
    }
    if (verify->parsed()) {
      const nlohmann::json report = mex::verify_artifact_dir(artifact_dir, delta);
      std::cout << report.dump(2) << "\n";
      return report.value("passed", false) ? 0 : 1;
    }
    if (make_env->parsed()) {
      std::string text;
      if (env_kind == "gridworld") {
        text = mex::to_text(mex::make_gridworld());
      } else if (env_kind == "random-mdp") {
        text = mex::to_text(mex::make_random_tabular_mdp(S, A, H, seed, sparsity));
      } else if (env_kind == "random-mg") {
        text = mex::to_text(mex::make_random_tabular_mg(S, A, B, H, seed));
      } else if (env_kind == "linear-mixture-mg") {
        text = mex::to_text(mex::make_linear_mixture_mg(d, S, A, B, H, seed).game);
      } else {
        std::cerr << "unknown env kind '" << env_kind << "'\n";
        return 2;
      }
      mex::save_text(env_out, text);
      std::cout << "wrote " << env_out << "\n";
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
