#include "mex/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <stdexcept>

namespace mex {

namespace fs = std::filesystem;

std::vector<MatrixXd> occupancy_measure(const EpisodicMDP& env, const Policy& policy) {
  validate_policy(policy, env.horizon(), env.n_states(), env.n_actions(), "occupancy_measure");
  const int H = env.horizon();
  const int S = env.n_states();
  const int A = env.n_actions();
  std::vector<MatrixXd> rho(H, MatrixXd::Zero(S, A));
  VectorXd d = VectorXd::Zero(S);
  d(env.initial_state()) = 1.0;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      if (d(s) == 0.0) continue;
      rho[h].row(s) = d(s) * policy.prob[h].row(s);
    }
    VectorXd next = VectorXd::Zero(S);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double w = rho[h](s, a);
        if (w == 0.0) continue;
        next += w * env.transition(h).row(sa_row(s, a, A)).transpose();
      }
    }
    d = next;
  }
  return rho;
}

namespace {

/// Per-member tables of the exact discrepancy at each (h, s, a):
/// Hellinger rows for model-based classes, squared expected Bellman
/// residuals for model-free classes.
std::vector<std::vector<MatrixXd>> discrepancy_tables(const EpisodicMDP& env,
                                                      const HypothesisClass& cls) {
  const int H = env.horizon();
  const int S = env.n_states();
  const int A = env.n_actions();
  std::vector<std::vector<MatrixXd>> tables(cls.size());
  for (int i = 0; i < cls.size(); ++i) {
    tables[i].assign(H, MatrixXd::Zero(S, A));
    for (int h = 0; h < H; ++h) {
      if (is_model_based(cls.kind)) {
        const ModelBasedHypothesis& m = cls.model_member(i);
        for (int s = 0; s < S; ++s) {
          for (int a = 0; a < A; ++a) {
            const Eigen::Index row = sa_row(s, a, A);
            tables[i][h](s, a) = hellinger_sq(m.kernel(h).row(row).transpose(),
                                              env.transition(h).row(row).transpose());
          }
        }
      } else {
        const ModelFreeHypothesis& m = cls.q_member(i);
        const VectorXd expected_next = env.transition(h) * m.v_slice(h + 1);
        for (int s = 0; s < S; ++s) {
          for (int a = 0; a < A; ++a) {
            const double residual =
                m.q(h)(s, a) - env.reward_at(h, s, a) - expected_next(sa_row(s, a, A));
            tables[i][h](s, a) = residual * residual;
          }
        }
      }
    }
  }
  return tables;
}

/// Occupancies of the logged exploration policies, cached per distinct
/// (selected index, override timestep) pair.
class ExplorationOccupancies {
 public:
  ExplorationOccupancies(const EpisodicMDP& env, const HypothesisClass& cls)
      : env_(&env), evaluator_(cls, env) {}

  const std::vector<MatrixXd>& of(int f_index, int override_h) {
    const auto key = std::make_pair(f_index, override_h);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      return it->second;
    }
    Policy policy = evaluator_.policy(f_index);
    if (override_h >= 0) {
      policy.prob[override_h].setConstant(1.0 / env_->n_actions());
    }
    return cache_.emplace(key, occupancy_measure(*env_, policy)).first->second;
  }

  MdpClassEvaluator& evaluator() { return evaluator_; }

 private:
  const EpisodicMDP* env_;
  MdpClassEvaluator evaluator_;
  std::map<std::pair<int, int>, std::vector<MatrixXd>> cache_;
};

std::string report_hash(const RunLog& log, const EpisodicMDP& env, const HypothesisClass& cls) {
  return content_hash(to_text(env) + to_text(cls) + episodes_csv(log) +
                      format_double(log.eta) + std::to_string(log.seed));
}

GeneralizationReport check_generalization_impl(const RunLog& log, const EpisodicMDP& env,
                                               const HypothesisClass& cls, double delta,
                                               bool model_based) {
  if (!cls.realizable || cls.true_index < 0) {
    throw std::invalid_argument("generalization check: a realizable class with f* is required");
  }
  if (log.episodes.size() != log.records.size()) {
    throw std::invalid_argument("generalization check: run log is missing episode data");
  }
  const int H = env.horizon();
  const int n = cls.size();
  const int K = static_cast<int>(log.records.size());
  const double log_card = std::log(static_cast<double>(n));

  double slack;
  double discrepancy_coef;
  if (model_based) {
    slack = 2.0 * H * std::log(H / delta) + 2.0 * log_card;
    discrepancy_coef = 2.0;
  } else {
    const double b_l_sq = loss_scale_model_free(H);
    slack = 16.0 * H * b_l_sq * std::log(static_cast<double>(H) * K / delta) +
            32.0 * b_l_sq * log_card;
    discrepancy_coef = 0.5;
  }

  const auto tables = discrepancy_tables(env, cls);
  ExplorationOccupancies occupancies(env, cls);
  LossLedger ledger(cls, env.n_states());

  GeneralizationReport report;
  report.max_margin = -std::numeric_limits<double>::infinity();
  VectorXd cumulative_discrepancy = VectorXd::Zero(n);

  for (int k = 1; k <= K; ++k) {
    // Ledger and discrepancy sums hold data from episodes 1..k-1 here.
    VectorXd loss_sums(n);
    for (int i = 0; i < n; ++i) {
      loss_sums(i) = ledger.total_loss(i);
    }
    for (int i = 0; i < n; ++i) {
      const double lhs = loss_sums(cls.true_index) - loss_sums(i);
      const double rhs = -discrepancy_coef * cumulative_discrepancy(i) + slack;
      const double margin = lhs - rhs;
      report.max_margin = std::max(report.max_margin, margin);
      if (margin > 1e-9) {
        ++report.n_violations;
      }
      ++report.n_checks;
    }
    const EpisodeRecord& record = log.records[k - 1];
    const auto& rho = occupancies.of(record.f_index, record.override_h);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int h = 0; h < H; ++h) {
        acc += rho[h].cwiseProduct(tables[i][h]).sum();
      }
      cumulative_discrepancy(i) += acc;
    }
    ledger.add_episode(log.episodes[k - 1]);
  }
  report.violation_rate =
      report.n_checks > 0 ? static_cast<double>(report.n_violations) / report.n_checks : 0.0;
  report.inputs_hash = report_hash(log, env, cls);
  return report;
}

}  // namespace

GeneralizationReport check_generalization_modelbased(const RunLog& log, const EpisodicMDP& env,
                                                     const HypothesisClass& cls, double delta) {
  if (!is_model_based(cls.kind) || is_game_kind(cls.kind)) {
    throw std::invalid_argument(
        "check_generalization_modelbased: expected a model-based MDP class");
  }
  return check_generalization_impl(log, env, cls, delta, true);
}

GeneralizationReport check_generalization_modelfree(const RunLog& log, const EpisodicMDP& env,
                                                    const HypothesisClass& cls, double delta) {
  if (is_model_based(cls.kind) || is_game_kind(cls.kind)) {
    throw std::invalid_argument("check_generalization_modelfree: expected a model-free MDP class");
  }
  return check_generalization_impl(log, env, cls, delta, false);
}

GecTrace empirical_gec_ratio(const RunLog& log, const EpisodicMDP& env,
                             const HypothesisClass& cls) {
  const int H = env.horizon();
  const int K = static_cast<int>(log.records.size());
  GecTrace trace;
  trace.ratios = VectorXd::Zero(K);
  if (K == 0) {
    return trace;
  }
  const auto tables = discrepancy_tables(env, cls);
  ExplorationOccupancies occupancies(env, cls);

  std::map<int, double> true_value_cache;
  std::vector<MatrixXd> aggregate_occ(H, MatrixXd::Zero(env.n_states(), env.n_actions()));
  double numerator = 0.0;
  double denominator = 0.0;

  for (int j = 1; j <= K; ++j) {
    const EpisodeRecord& record = log.records[j - 1];
    const int f = record.f_index;
    auto it = true_value_cache.find(f);
    if (it == true_value_cache.end()) {
      const ValueTable values = policy_evaluation(env, occupancies.evaluator().policy(f));
      it = true_value_cache.emplace(f, values.V[0](env.initial_state())).first;
    }
    numerator += occupancies.evaluator().value(f) - it->second;

    double agg = 0.0;
    for (int h = 0; h < H; ++h) {
      agg += aggregate_occ[h].cwiseProduct(tables[f][h]).sum();
    }
    denominator += agg;

    const double den = std::sqrt(std::max(denominator, 0.0) * j);
    trace.ratios(j - 1) = den < 1e-12 ? 0.0 : numerator / den;

    const auto& rho = occupancies.of(record.f_index, record.override_h);
    for (int h = 0; h < H; ++h) {
      aggregate_occ[h] += rho[h];
    }
  }
  const int mid = K / 2;
  if (mid >= 1 && K >= 2) {
    const double early = trace.ratios(mid - 1);
    const double late = trace.ratios(K - 1);
    trace.divergence_flag = late > 2.0 * std::max(early, 0.0) + 1e-9 && late > 1e-9;
  }
  return trace;
}

nlohmann::json verify_artifact_dir(const std::string& dir, double delta) {
  nlohmann::json report;
  const std::string env_text = load_text((fs::path(dir) / "env.json").string());
  const std::string class_text = load_text((fs::path(dir) / "class.json").string());
  const nlohmann::json env_doc = nlohmann::json::parse(env_text);
  const HypothesisClass cls = class_from_text(class_text);
  const RunLog log = load_runlog(dir);

  report["inputs"] = {{"env_hash", content_hash(env_text)},
                      {"class_hash", content_hash(class_text)},
                      {"episodes_hash", content_hash(episodes_csv(log))},
                      {"algorithm", log.algorithm},
                      {"episodes", static_cast<int>(log.records.size())}};
  nlohmann::json checks = nlohmann::json::array();
  bool all_passed = true;

  if (env_doc.value("type", "mdp") == "mdp") {
    const EpisodicMDP env = mdp_from_text(env_text);

    // Logged gaps must match a from-scratch oracle recomputation.
    {
      MdpClassEvaluator evaluator(cls, env);
      const PlanResult oracle = plan_optimal(env);
      const double v_star = oracle.values.V[0](env.initial_state());
      double worst = 0.0;
      std::map<int, double> gap_by_index;
      for (const EpisodeRecord& r : log.records) {
        auto it = gap_by_index.find(r.f_index);
        if (it == gap_by_index.end()) {
          const ValueTable values = policy_evaluation(env, evaluator.policy(r.f_index));
          it = gap_by_index.emplace(r.f_index, v_star - values.V[0](env.initial_state())).first;
        }
        worst = std::max(worst, std::abs(it->second - r.gap));
      }
      const bool passed = worst <= 1e-10;
      checks.push_back({{"name", "oracle_consistency"},
                        {"passed", passed},
                        {"worst_abs_error", worst}});
      all_passed = all_passed && passed;
    }

    if (cls.realizable && cls.true_index >= 0) {
      const GeneralizationReport gen =
          is_model_based(cls.kind) ? check_generalization_modelbased(log, env, cls, delta)
                                   : check_generalization_modelfree(log, env, cls, delta);
      checks.push_back({{"name", is_model_based(cls.kind) ? "generalization_model_based"
                                                          : "generalization_model_free"},
                        {"passed", gen.clean()},
                        {"n_checks", gen.n_checks},
                        {"n_violations", gen.n_violations},
                        {"max_margin", gen.max_margin},
                        {"violation_rate", gen.violation_rate},
                        {"delta", delta},
                        {"inputs_hash", gen.inputs_hash}});
      all_passed = all_passed && gen.clean();
    } else {
      checks.push_back({{"name", "generalization"},
                        {"passed", true},
                        {"skipped", "class is not flagged realizable"}});
    }

    const GecTrace trace = empirical_gec_ratio(log, env, cls);
    checks.push_back({{"name", "gec_ratio_trace"},
                      {"passed", !trace.divergence_flag},
                      {"final_ratio", trace.ratios.size() > 0 ? trace.ratios(trace.ratios.size() - 1) : 0.0},
                      {"max_ratio", trace.ratios.size() > 0 ? trace.ratios.maxCoeff() : 0.0},
                      {"divergence_flag", trace.divergence_flag}});
    all_passed = all_passed && !trace.divergence_flag;
  } else {
    const ZeroSumMG env = mg_from_text(env_text);
    // Per-episode sandwich: the best-response value never exceeds the
    // equilibrium value (gap stays above -1e-8).
    double worst_gap = 0.0;
    for (const EpisodeRecord& r : log.records) {
      worst_gap = std::min(worst_gap, r.gap);
    }
    const bool sandwich = worst_gap >= -1e-8;
    checks.push_back(
        {{"name", "value_sandwich"}, {"passed", sandwich}, {"worst_gap", worst_gap}});
    all_passed = all_passed && sandwich;

    const NePlanResult oracle = ne_value_iteration(env);
    const double v_star = oracle.values.V[0](env.initial_state());
    const bool oracle_match = std::abs(v_star - log.oracle_value) <= 1e-10;
    checks.push_back({{"name", "oracle_consistency"},
                      {"passed", oracle_match},
                      {"worst_abs_error", std::abs(v_star - log.oracle_value)}});
    all_passed = all_passed && oracle_match;
  }

  report["checks"] = checks;
  report["passed"] = all_passed;
  save_text((fs::path(dir) / "verify.json").string(), report.dump(2));
  return report;
}

}  // namespace mex
