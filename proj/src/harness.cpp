#include "mex/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mex {

namespace fs = std::filesystem;

RegretCurve compute_regret(const RunLog& log, const EpisodicMDP& env) {
  const PlanResult oracle = plan_optimal(env);
  const double v_star = oracle.values.V[0](env.initial_state());
  std::map<int, double> gap_by_index;
  for (const auto& [index, policy] : log.predicted_policies) {
    const ValueTable values = policy_evaluation(env, policy);
    gap_by_index[index] = v_star - values.V[0](env.initial_state());
  }
  RegretCurve curve;
  curve.gaps.resize(log.records.size());
  curve.cumulative.resize(log.records.size());
  double acc = 0.0;
  for (size_t i = 0; i < log.records.size(); ++i) {
    const auto it = gap_by_index.find(log.records[i].f_index);
    if (it == gap_by_index.end()) {
      throw std::invalid_argument("compute_regret: missing predicted policy for logged index");
    }
    curve.gaps(i) = it->second;
    acc += it->second;
    curve.cumulative(i) = acc;
  }
  return curve;
}

RegretCurve compute_regret(const RunLog& log, const ZeroSumMG& env) {
  const NePlanResult oracle = ne_value_iteration(env);
  const double v_star = oracle.values.V[0](env.initial_state());
  std::map<int, double> gap_by_index;
  for (const auto& [index, policy] : log.predicted_policies) {
    const BrPlanResult response = best_response_value_iteration(env, policy);
    gap_by_index[index] = v_star - response.values.V[0](env.initial_state());
  }
  RegretCurve curve;
  curve.gaps.resize(log.records.size());
  curve.cumulative.resize(log.records.size());
  double acc = 0.0;
  for (size_t i = 0; i < log.records.size(); ++i) {
    const auto it = gap_by_index.find(log.records[i].f_index);
    if (it == gap_by_index.end()) {
      throw std::invalid_argument("compute_regret: missing predicted policy for logged index");
    }
    curve.gaps(i) = it->second;
    acc += it->second;
    curve.cumulative(i) = acc;
  }
  return curve;
}

PowerLawFit fit_power_law(const VectorXd& cumulative) {
  const int n = static_cast<int>(cumulative.size());
  if (n < 50) {
    throw std::invalid_argument("fit_power_law: need at least 50 points");
  }
  PowerLawFit fit;
  std::vector<double> xs, ys;
  for (int i = n / 2; i < n; ++i) {
    if (cumulative(i) > 0.0) {
      xs.push_back(std::log(static_cast<double>(i + 1)));
      ys.push_back(std::log(cumulative(i)));
    } else {
      ++fit.n_dropped;
    }
  }
  if (xs.size() < 2) {
    fit.degenerate = true;
    fit.exponent = 0.0;
    fit.coefficient = 0.0;
    fit.r_squared = 1.0;
    return fit;
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) {
    fit.degenerate = true;
    fit.exponent = 0.0;
    fit.r_squared = 1.0;
    return fit;
  }
  fit.exponent = sxy / sxx;
  fit.coefficient = std::exp(my - fit.exponent * mx);
  double ss_res = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double pred = my + fit.exponent * (xs[i] - mx);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
  }
  fit.r_squared = syy <= 1e-18 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

double eta_from_theory(double d_proxy, int horizon, int episodes, double loss_scale,
                       double log_card, double delta) {
  if (d_proxy <= 0.0 || horizon < 1 || episodes < 1 || loss_scale <= 0.0 || delta <= 0.0) {
    throw std::invalid_argument("eta_from_theory: arguments must be positive");
  }
  const double log_term =
      horizon * std::log(static_cast<double>(horizon) * episodes / delta) + log_card;
  const double denom = log_term * loss_scale * episodes;
  if (denom <= 0.0) {
    throw std::invalid_argument("eta_from_theory: nonpositive denominator");
  }
  return std::sqrt(d_proxy / denom);
}

double d_proxy_tabular(int n_states, int n_actions, int horizon, int episodes) {
  return static_cast<double>(n_states) * n_states * n_actions * horizon *
         std::log(static_cast<double>(episodes));
}

double d_proxy_linear_mixture(int d, int horizon, int episodes) {
  return static_cast<double>(d) * horizon * horizon *
         std::log(static_cast<double>(horizon) * episodes);
}

RunLog baseline_epsilon_greedy(const EpisodicMDP& env, const HypothesisClass& cls, double epsilon,
                               int episodes, std::uint64_t seed) {
  if (!is_model_based(cls.kind) || is_game_kind(cls.kind)) {
    throw std::invalid_argument("baseline_epsilon_greedy: expected a model-based MDP class");
  }
  if (epsilon < 0.0 || epsilon > 1.0) {
    throw std::invalid_argument("baseline_epsilon_greedy: epsilon must lie in [0,1]");
  }
  RunLog log;
  log.seed = seed;
  log.eta = 0.0;
  log.algorithm = "eps-greedy";
  log.realizable_class = cls.realizable && cls.true_index >= 0;

  const PlanResult oracle = plan_optimal(env);
  log.oracle_value = oracle.values.V[0](env.initial_state());

  MdpClassEvaluator evaluator(cls, env);
  LossLedger ledger(cls, env.n_states());
  Rng rng(seed);
  const MatrixXd uniform_row =
      MatrixXd::Constant(env.n_states(), env.n_actions(), 1.0 / env.n_actions());
  std::map<int, double> gap_cache;
  std::map<int, Policy> behavior_cache;

  double cum_regret = 0.0;
  for (int k = 1; k <= episodes; ++k) {
    int ml = 0;
    double best = ledger.total_loss(0);
    for (int i = 1; i < cls.size(); ++i) {
      const double loss = ledger.total_loss(i);
      if (loss < best) {
        best = loss;
        ml = i;
      }
    }
    auto behavior_it = behavior_cache.find(ml);
    if (behavior_it == behavior_cache.end()) {
      Policy mixed = evaluator.policy(ml);
      for (int h = 0; h < env.horizon(); ++h) {
        mixed.prob[h] = (1.0 - epsilon) * mixed.prob[h] + epsilon * uniform_row;
      }
      const ValueTable values = policy_evaluation(env, mixed);
      gap_cache.emplace(ml, log.oracle_value - values.V[0](env.initial_state()));
      log.predicted_policies.emplace(ml, mixed);
      behavior_it = behavior_cache.emplace(ml, std::move(mixed)).first;
    }
    Episode episode = sample_episode(env, behavior_it->second, rng);
    episode.tag.mode = "eps-greedy";

    const double gap = gap_cache.at(ml);
    cum_regret += gap;

    EpisodeRecord record;
    record.k = k;
    record.f_index = ml;
    record.exploration_mode = episode.tag.mode;
    record.realized_return = episode.total_reward();
    record.gap = gap;
    record.cum_regret = cum_regret;
    record.objective = -ledger.total_loss(ml);
    log.records.push_back(record);

    ledger.add_episode(episode);
    log.episodes.push_back(std::move(episode));
  }
  log.ledger_csv = ledger.snapshot_csv();
  return log;
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string runlog_csv(const RunLog& log) {
  const bool game = log.algorithm == "mex-mg";
  std::ostringstream out;
  out << (game ? "k,f_index,g_index,return,gap,cum_regret,objective,eta\n"
               : "k,f_index,return,gap,cum_regret,objective,eta\n");
  for (const EpisodeRecord& r : log.records) {
    out << r.k << ',' << r.f_index << ',';
    if (game) {
      out << r.g_index << ',';
    }
    out << format_double(r.realized_return) << ',' << format_double(r.gap) << ','
        << format_double(r.cum_regret) << ',' << format_double(r.objective) << ','
        << format_double(log.eta) << '\n';
  }
  return out.str();
}

std::string regret_csv(const RunLog& log) {
  std::ostringstream out;
  out << "k,gap,cum_regret\n";
  for (const EpisodeRecord& r : log.records) {
    out << r.k << ',' << format_double(r.gap) << ',' << format_double(r.cum_regret) << '\n';
  }
  return out.str();
}

std::string episodes_csv(const RunLog& log) {
  std::ostringstream out;
  out << "k,h,state,action,min_action,reward,next_state,mode,override_h\n";
  for (size_t i = 0; i < log.episodes.size(); ++i) {
    const Episode& episode = log.episodes[i];
    for (size_t h = 0; h < episode.steps.size(); ++h) {
      const Step& s = episode.steps[h];
      out << (i + 1) << ',' << (h + 1) << ',' << s.state << ',' << s.action << ','
          << s.min_action << ',' << format_double(s.reward) << ',' << s.next_state << ','
          << episode.tag.mode << ',' << episode.tag.override_h << '\n';
    }
  }
  return out.str();
}

void write_run_artifacts(const RunLog& log, const std::string& env_text,
                         const std::string& class_text, const std::string& dir) {
  fs::create_directories(dir);
  save_text((fs::path(dir) / "runlog.csv").string(), runlog_csv(log));
  save_text((fs::path(dir) / "regret.csv").string(), regret_csv(log));
  save_text((fs::path(dir) / "episodes.csv").string(), episodes_csv(log));
  save_text((fs::path(dir) / "ledger.csv").string(), log.ledger_csv);
  if (!env_text.empty()) {
    save_text((fs::path(dir) / "env.json").string(), env_text);
  }
  if (!class_text.empty()) {
    save_text((fs::path(dir) / "class.json").string(), class_text);
  }
  nlohmann::json meta;
  meta["algorithm"] = log.algorithm;
  meta["eta"] = log.eta;
  meta["seed"] = log.seed;
  meta["oracle_value"] = log.oracle_value;
  meta["realizable_class"] = log.realizable_class;
  meta["episodes"] = static_cast<int>(log.records.size());
  save_text((fs::path(dir) / "runmeta.json").string(), meta.dump(2));
}

RunLog load_runlog(const std::string& dir) {
  RunLog log;
  const nlohmann::json meta = nlohmann::json::parse(load_text((fs::path(dir) / "runmeta.json").string()));
  log.algorithm = meta.at("algorithm").get<std::string>();
  log.eta = meta.at("eta").get<double>();
  log.seed = meta.at("seed").get<std::uint64_t>();
  log.oracle_value = meta.at("oracle_value").get<double>();
  log.realizable_class = meta.at("realizable_class").get<bool>();

  const std::string run_csv = load_text((fs::path(dir) / "runlog.csv").string());
  std::istringstream run_in(run_csv);
  std::string line;
  std::getline(run_in, line);
  const bool game = line.find(",g_index,") != std::string::npos;
  while (std::getline(run_in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    EpisodeRecord r;
    std::getline(row, field, ',');
    r.k = std::stoi(field);
    std::getline(row, field, ',');
    r.f_index = std::stoi(field);
    if (game) {
      std::getline(row, field, ',');
      r.g_index = std::stoi(field);
    }
    std::getline(row, field, ',');
    r.realized_return = std::stod(field);
    std::getline(row, field, ',');
    r.gap = std::stod(field);
    std::getline(row, field, ',');
    r.cum_regret = std::stod(field);
    std::getline(row, field, ',');
    r.objective = std::stod(field);
    log.records.push_back(r);
  }

  const std::string ep_csv = load_text((fs::path(dir) / "episodes.csv").string());
  std::istringstream ep_in(ep_csv);
  std::getline(ep_in, line);  // header
  Episode current;
  int current_k = 0;
  while (std::getline(ep_in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, ',');
    const int k = std::stoi(field);
    if (k != current_k) {
      if (current_k > 0) {
        log.episodes.push_back(current);
      }
      current = Episode{};
      current_k = k;
    }
    Step s{};
    std::getline(row, field, ',');  // h
    std::getline(row, field, ',');
    s.state = std::stoi(field);
    std::getline(row, field, ',');
    s.action = std::stoi(field);
    std::getline(row, field, ',');
    s.min_action = std::stoi(field);
    std::getline(row, field, ',');
    s.reward = std::stod(field);
    std::getline(row, field, ',');
    s.next_state = std::stoi(field);
    std::getline(row, field, ',');
    current.tag.mode = field;
    std::getline(row, field, ',');
    current.tag.override_h = std::stoi(field);
    current.steps.push_back(s);
  }
  if (current_k > 0) {
    log.episodes.push_back(current);
  }
  return log;
}

std::string content_hash(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

double trailing_mean_return(const RunLog& log, const EpisodicMDP& env, int window) {
  const int n = static_cast<int>(log.records.size());
  const int lo = std::max(0, n - window);
  if (n == 0 || lo == n) {
    return 0.0;
  }
  double acc = 0.0;
  for (int i = lo; i < n; ++i) {
    acc += log.records[i].realized_return;
  }
  return acc / (n - lo) / env.reward_scale();
}

GridworldBenchmark run_gridworld_benchmark(std::uint64_t seed, int episodes, int window,
                                           double epsilon) {
  const EpisodicMDP env = make_gridworld();
  TabularClassOptions options;
  options.n_members = 32;
  // One pessimistic member that seals the goal entries; its only divergent
  // rows are never visited by a planner that believes them, which is what
  // makes the certainty-equivalent baseline stall.
  options.n_sticky = 1;
  options.sticky_extra_states = 0;
  options.perturbation = 0.4;
  options.min_perturbation = 0.02;
  options.seed = seed * 7919 + 17;
  const HypothesisClass cls = enumerate_tabular_model_class(env, options);

  MexConfig cfg;
  cfg.episodes = episodes;
  cfg.seed = seed;
  cfg.eta = eta_from_theory(
      d_proxy_tabular(env.n_states(), env.n_actions(), env.horizon(), episodes), env.horizon(),
      episodes, loss_scale_model_based(), std::log(static_cast<double>(cls.size())), 0.05);

  GridworldBenchmark result;
  result.mex_log = run_mex_mdp(env, cls, cfg);
  result.baseline_log = baseline_epsilon_greedy(env, cls, epsilon, episodes, seed);
  result.window = window;
  result.mex_mean_return = trailing_mean_return(result.mex_log, env, window);
  result.baseline_mean_return = trailing_mean_return(result.baseline_log, env, window);
  return result;
}

namespace {

void check_keys(const nlohmann::json& section, const std::set<std::string>& known,
                const std::string& where) {
  for (const auto& [key, value] : section.items()) {
    if (!known.count(key)) {
      throw std::invalid_argument("config error at [" + where + "]: unknown key '" + key + "'");
    }
  }
}

struct EnvHolder {
  std::unique_ptr<EpisodicMDP> mdp;
  std::unique_ptr<ZeroSumMG> mg;
  std::unique_ptr<LinearMixtureMg> mixture;
};

EnvHolder build_env(const nlohmann::json& section) {
  check_keys(section,
             {"kind", "n_states", "n_actions", "n_min_actions", "horizon", "seed", "sparsity",
              "noise", "obstacle", "goal", "d", "path"},
             "env");
  const std::string kind = section.at("kind").get<std::string>();
  EnvHolder holder;
  if (kind == "random_mdp") {
    holder.mdp = std::make_unique<EpisodicMDP>(make_random_tabular_mdp(
        section.at("n_states").get<int>(), section.at("n_actions").get<int>(),
        section.at("horizon").get<int>(), section.value("seed", 0ull),
        section.value("sparsity", 0.2)));
  } else if (kind == "gridworld") {
    GridworldOptions options;
    options.noise = section.value("noise", 0.2);
    options.obstacle = section.value("obstacle", true);
    options.goal = section.value("goal", true);
    holder.mdp = std::make_unique<EpisodicMDP>(make_gridworld(options));
  } else if (kind == "random_mg") {
    holder.mg = std::make_unique<ZeroSumMG>(make_random_tabular_mg(
        section.at("n_states").get<int>(), section.at("n_actions").get<int>(),
        section.at("n_min_actions").get<int>(), section.at("horizon").get<int>(),
        section.value("seed", 0ull)));
  } else if (kind == "linear_mixture_mg") {
    holder.mixture = std::make_unique<LinearMixtureMg>(make_linear_mixture_mg(
        section.at("d").get<int>(), section.at("n_states").get<int>(),
        section.at("n_actions").get<int>(), section.at("n_min_actions").get<int>(),
        section.at("horizon").get<int>(), section.value("seed", 0ull)));
    holder.mg = std::make_unique<ZeroSumMG>(holder.mixture->game);
  } else if (kind == "file") {
    const std::string text = load_text(section.at("path").get<std::string>());
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.value("type", "mdp") == "mdp") {
      holder.mdp = std::make_unique<EpisodicMDP>(mdp_from_text(text));
    } else {
      holder.mg = std::make_unique<ZeroSumMG>(mg_from_text(text));
    }
  } else {
    throw std::invalid_argument("config error at [env]: unknown kind '" + kind + "'");
  }
  return holder;
}

HypothesisClass build_class(const nlohmann::json& section, const EnvHolder& env) {
  check_keys(section,
             {"kind", "n_members", "perturbation", "min_perturbation", "n_sticky",
              "sticky_extra_states", "seed", "size_cap", "grid_size"},
             "class");
  const std::string kind = section.value("kind", "tabular");
  TabularClassOptions options;
  options.n_members = section.value("n_members", 64);
  options.perturbation = section.value("perturbation", 0.25);
  options.min_perturbation = section.value("min_perturbation", 0.0);
  options.n_sticky = section.value("n_sticky", 0);
  options.sticky_extra_states = section.value("sticky_extra_states", 2);
  options.seed = section.value("seed", 0ull);
  options.size_cap = section.value("size_cap", 1 << 20);

  if (kind == "tabular") {
    if (env.mdp) return enumerate_tabular_model_class(*env.mdp, options);
    return enumerate_tabular_model_class(*env.mg, options);
  }
  if (kind == "model_free") {
    if (env.mdp) {
      return modelfree_class_from_models(enumerate_tabular_model_class(*env.mdp, options),
                                         *env.mdp);
    }
    return modelfree_class_from_models(enumerate_tabular_model_class(*env.mg, options), *env.mg);
  }
  if (kind == "linear_mixture") {
    if (!env.mixture) {
      throw std::invalid_argument(
          "config error at [class]: linear_mixture requires a linear_mixture_mg env");
    }
    const int grid_size = section.value("grid_size", 31);
    Rng rng(options.seed);
    const int d = env.mixture->features.d;
    const double sqrt_d = std::sqrt(static_cast<double>(d));
    std::vector<VectorXd> grid;
    for (int i = 0; i < grid_size; ++i) {
      VectorXd w(d);
      double sum = 0.0;
      for (int j = 0; j < d; ++j) {
        double u;
        do {
          u = rng.uniform();
        } while (u <= 0.0);
        w(j) = u;
        sum += u;
      }
      w /= sum;
      grid.push_back(sqrt_d * w);
    }
    return build_linear_mixture_class(env.mixture->features, std::move(grid),
                                      env.mixture->theta_star);
  }
  throw std::invalid_argument("config error at [class]: unknown kind '" + kind + "'");
}

struct AlgoSettings {
  std::string name = "mex";
  int episodes = 1000;
  double eta = -1.0;  // -1 means theory default
  ExplorationMode mode = ExplorationMode::QType;
  double epsilon = 0.1;
  double delta = 0.05;
  std::uint64_t seed = 0;
};

AlgoSettings parse_algo(const nlohmann::json& section) {
  check_keys(section, {"name", "episodes", "eta", "exploration", "epsilon", "delta", "seed"},
             "algo");
  AlgoSettings algo;
  algo.name = section.value("name", "mex");
  algo.episodes = section.value("episodes", 1000);
  if (section.contains("eta")) {
    if (section.at("eta").is_string()) {
      if (section.at("eta").get<std::string>() != "theory") {
        throw std::invalid_argument("config error at [algo]: eta must be a number or \"theory\"");
      }
    } else {
      algo.eta = section.at("eta").get<double>();
    }
  }
  const std::string mode = section.value("exploration", "q-type");
  if (mode == "q-type") {
    algo.mode = ExplorationMode::QType;
  } else if (mode == "v-type") {
    algo.mode = ExplorationMode::VType;
  } else {
    throw std::invalid_argument("config error at [algo]: unknown exploration '" + mode + "'");
  }
  algo.epsilon = section.value("epsilon", 0.1);
  algo.delta = section.value("delta", 0.05);
  algo.seed = section.value("seed", 0ull);
  return algo;
}

double theory_eta(const AlgoSettings& algo, const EnvHolder& env, const HypothesisClass& cls) {
  const bool model_based = is_model_based(cls.kind);
  int H, S, A;
  if (env.mdp) {
    H = env.mdp->horizon();
    S = env.mdp->n_states();
    A = env.mdp->n_actions();
  } else {
    H = env.mg->horizon();
    S = env.mg->n_states();
    A = env.mg->n_actions() * env.mg->n_min_actions();
  }
  double d_proxy;
  if (!cls.linear_thetas.empty()) {
    d_proxy = d_proxy_linear_mixture(static_cast<int>(cls.linear_thetas.front().size()), H,
                                     algo.episodes);
  } else {
    d_proxy = d_proxy_tabular(S, A, H, algo.episodes);
  }
  const double scale = model_based ? loss_scale_model_based() : loss_scale_model_free(H);
  return eta_from_theory(d_proxy, H, algo.episodes, scale,
                         std::log(static_cast<double>(cls.size())), algo.delta);
}

RunLog run_cell(const EnvHolder& env, const HypothesisClass& cls, const AlgoSettings& algo,
                double eta, std::uint64_t seed) {
  if (algo.name == "eps-greedy") {
    if (!env.mdp) {
      throw std::invalid_argument("config error at [algo]: eps-greedy needs an MDP env");
    }
    return baseline_epsilon_greedy(*env.mdp, cls, algo.epsilon, algo.episodes, seed);
  }
  if (algo.name != "mex") {
    throw std::invalid_argument("config error at [algo]: unknown name '" + algo.name + "'");
  }
  MexConfig cfg;
  cfg.eta = eta;
  cfg.exploration_mode = algo.mode;
  cfg.episodes = algo.episodes;
  cfg.seed = seed;
  if (env.mdp) {
    return run_mex_mdp(*env.mdp, cls, cfg);
  }
  return run_mex_mg(*env.mg, cls, cfg);
}

}  // namespace

SuiteResult run_suite(const nlohmann::json& config, const std::string& out_dir) {
  check_keys(config, {"env", "class", "algo", "sweep", "accept"}, "top level");
  if (!config.contains("env") || !config.contains("class") || !config.contains("algo")) {
    throw std::invalid_argument("config error: sections [env], [class], [algo] are required");
  }
  const EnvHolder env = build_env(config.at("env"));
  const HypothesisClass cls = build_class(config.at("class"), env);
  const AlgoSettings algo = parse_algo(config.at("algo"));

  std::vector<double> etas;
  std::vector<std::uint64_t> seeds;
  if (config.contains("sweep")) {
    check_keys(config.at("sweep"), {"etas", "seeds"}, "sweep");
    if (config.at("sweep").contains("etas")) {
      etas = config.at("sweep").at("etas").get<std::vector<double>>();
    }
    if (config.at("sweep").contains("seeds")) {
      seeds = config.at("sweep").at("seeds").get<std::vector<std::uint64_t>>();
    }
  }
  if (etas.empty()) {
    etas.push_back(algo.eta >= 0.0 ? algo.eta : theory_eta(algo, env, cls));
  }
  if (seeds.empty()) {
    seeds.push_back(algo.seed);
  }

  nlohmann::json accept;
  if (config.contains("accept")) {
    check_keys(config.at("accept"), {"max_exponent", "min_r2", "max_final_regret"}, "accept");
    accept = config.at("accept");
  }

  fs::create_directories(out_dir);
  const std::string env_text = env.mdp ? to_text(*env.mdp) : to_text(*env.mg);
  const std::string class_text = to_text(cls);

  // Oracle values are environment properties; compute once and cache.
  const fs::path oracle_path = fs::path(out_dir) / "oracle.json";
  double oracle_value;
  if (fs::exists(oracle_path)) {
    oracle_value =
        nlohmann::json::parse(load_text(oracle_path.string())).at("oracle_value").get<double>();
  } else {
    oracle_value = env.mdp
                       ? plan_optimal(*env.mdp).values.V[0](env.mdp->initial_state())
                       : ne_value_iteration(*env.mg).values.V[0](env.mg->initial_state());
    nlohmann::json oracle;
    oracle["oracle_value"] = oracle_value;
    save_text(oracle_path.string(), oracle.dump(2));
  }

  SuiteResult result;
  result.report["config"] = config;
  result.report["oracle_value"] = oracle_value;
  nlohmann::json cells = nlohmann::json::array();
  bool all_passed = true;

  for (size_t ei = 0; ei < etas.size(); ++ei) {
    for (size_t si = 0; si < seeds.size(); ++si) {
      std::ostringstream cell_name;
      cell_name << "eta" << ei << "_seed" << si;
      const std::string cell_dir = (fs::path(out_dir) / cell_name.str()).string();
      RunLog log = run_cell(env, cls, algo, etas[ei], seeds[si]);
      write_run_artifacts(log, env_text, class_text, cell_dir);

      nlohmann::json cell;
      cell["name"] = cell_name.str();
      cell["eta"] = etas[ei];
      cell["seed"] = seeds[si];
      cell["final_cum_regret"] = log.final_cum_regret();
      if (!log.records.empty()) {
        cell["final_f_index"] = log.records.back().f_index;
      }
      if (static_cast<int>(log.records.size()) >= 50) {
        VectorXd cumulative(log.records.size());
        for (size_t i = 0; i < log.records.size(); ++i) {
          cumulative(i) = log.records[i].cum_regret;
        }
        const PowerLawFit fit = fit_power_law(cumulative);
        cell["fit"] = {{"coefficient", fit.coefficient},
                       {"exponent", fit.exponent},
                       {"r_squared", fit.r_squared},
                       {"n_dropped", fit.n_dropped},
                       {"degenerate", fit.degenerate},
                       {"window", "second half"}};
        bool cell_passed = true;
        if (accept.contains("max_exponent") && !fit.degenerate &&
            fit.exponent > accept.at("max_exponent").get<double>()) {
          cell_passed = false;
        }
        if (accept.contains("min_r2") && !fit.degenerate &&
            fit.r_squared < accept.at("min_r2").get<double>()) {
          cell_passed = false;
        }
        if (accept.contains("max_final_regret") &&
            log.final_cum_regret() > accept.at("max_final_regret").get<double>()) {
          cell_passed = false;
        }
        cell["passed"] = cell_passed;
        all_passed = all_passed && cell_passed;
      }
      cells.push_back(cell);
    }
  }
  result.report["cells"] = cells;
  result.report["passed"] = all_passed;
  result.passed = all_passed;
  save_text((fs::path(out_dir) / "summary.json").string(), result.report.dump(2));
  return result;
}

SuiteResult run_suite_file(const std::string& config_path, const std::string& out_dir) {
  return run_suite(nlohmann::json::parse(load_text(config_path)), out_dir);
}

}  // namespace mex
