#include "mex/mex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mex {

std::string exploration_mode_name(ExplorationMode mode) {
  return mode == ExplorationMode::QType ? "q-type" : "v-type";
}

MdpClassEvaluator::MdpClassEvaluator(const HypothesisClass& cls, const EpisodicMDP& env)
    : cls_(&cls), env_(&env) {
  if (is_game_kind(cls.kind)) {
    throw std::invalid_argument("MdpClassEvaluator: game-kind class");
  }
  planned_.assign(cls.size(), 0);
  values_.assign(cls.size(), 0.0);
  policies_.resize(cls.size());
}

void MdpClassEvaluator::ensure_plan(int member) const {
  if (planned_[member]) {
    return;
  }
  if (is_model_based(cls_->kind)) {
    PlanResult plan = plan_optimal(cls_->model_member(member), *env_);
    values_[member] = plan.values.V[0](env_->initial_state());
    policies_[member] = std::move(plan.policy);
  } else {
    const ModelFreeHypothesis& f = cls_->q_member(member);
    values_[member] = f.v(0, env_->initial_state());
    policies_[member] = f.greedy();
  }
  planned_[member] = 1;
}

double MdpClassEvaluator::value(int member) const {
  ensure_plan(member);
  return values_[member];
}

const Policy& MdpClassEvaluator::policy(int member) const {
  ensure_plan(member);
  return policies_[member];
}

MgClassEvaluator::MgClassEvaluator(const HypothesisClass& cls, const ZeroSumMG& env)
    : cls_(&cls), env_(&env) {
  if (!is_game_kind(cls.kind)) {
    throw std::invalid_argument("MgClassEvaluator: MDP-kind class");
  }
  solved_.assign(cls.size(), 0);
  values_.assign(cls.size(), 0.0);
  max_policies_.resize(cls.size());
}

void MgClassEvaluator::ensure_ne(int member) const {
  if (solved_[member]) {
    return;
  }
  if (is_model_based(cls_->kind)) {
    NePlanResult plan = ne_value_iteration(cls_->model_member(member), *env_);
    values_[member] = plan.values.V[0](env_->initial_state());
    max_policies_[member] = std::move(plan.policy.max_policy);
  } else {
    const ModelFreeHypothesis& f = cls_->q_member(member);
    values_[member] = f.v(0, env_->initial_state());
    max_policies_[member] = f.ne_max_policy();
  }
  solved_[member] = 1;
}

double MgClassEvaluator::ne_value(int member) const {
  ensure_ne(member);
  return values_[member];
}

const Policy& MgClassEvaluator::ne_max_policy(int member) const {
  ensure_ne(member);
  return max_policies_[member];
}

double MgClassEvaluator::br_value(int member, int mu_member, const Policy& mu) const {
  const auto key = std::make_pair(member, mu_member);
  auto it = br_values_.find(key);
  if (it != br_values_.end()) {
    return it->second;
  }
  double value = 0.0;
  if (is_model_based(cls_->kind)) {
    BrPlanResult plan = best_response_value_iteration(cls_->model_member(member), *env_, mu);
    value = plan.values.V[0](env_->initial_state());
  } else {
    // One-step formula: inf_nu D_{(mu_1, nu_1)} Q_{1,g}(x1).
    const ModelFreeHypothesis& g = cls_->q_member(member);
    const int x1 = env_->initial_state();
    const int A = g.n_actions();
    const int B = g.n_min_actions();
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < B; ++b) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        v += mu.prob[0](x1, a) * g.q(0)(x1, ab_col(a, b, B));
      }
      best = std::min(best, v);
    }
    value = best;
  }
  br_values_.emplace(key, value);
  return value;
}

Policy MgClassEvaluator::br_min_policy(int member, const Policy& mu) const {
  if (is_model_based(cls_->kind)) {
    return best_response_value_iteration(cls_->model_member(member), *env_, mu).min_policy;
  }
  const ModelFreeHypothesis& g = cls_->q_member(member);
  const int H = g.horizon();
  const int S = g.n_states();
  const int A = g.n_actions();
  const int B = g.n_min_actions();
  Policy nu;
  nu.prob.assign(H, MatrixXd::Zero(S, B));
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      VectorXd response(B);
      for (int b = 0; b < B; ++b) {
        double v = 0.0;
        for (int a = 0; a < A; ++a) {
          v += mu.prob[h](s, a) * g.q(h)(s, ab_col(a, b, B));
        }
        response(b) = v;
      }
      const double best = response.minCoeff();
      for (int b = 0; b < B; ++b) {
        if (response(b) <= best + 1e-9) {
          nu.prob[h](s, b) = 1.0;
          break;
        }
      }
    }
  }
  return nu;
}

double mex_objective(int member, const MdpClassEvaluator& evaluator, const LossLedger& ledger,
                     double eta) {
  return evaluator.value(member) - eta * ledger.total_loss(member);
}

int mex_select_from_scores(const VectorXd& values, const VectorXd& total_losses, double eta) {
  int best = 0;
  double best_score = values(0) - eta * total_losses(0);
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    const double score = values(i) - eta * total_losses(i);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int mex_select(const MdpClassEvaluator& evaluator, const LossLedger& ledger, double eta) {
  const int n = ledger.class_size();
  VectorXd values(n), losses(n);
  for (int i = 0; i < n; ++i) {
    values(i) = evaluator.value(i);
    losses(i) = ledger.total_loss(i);
  }
  return mex_select_from_scores(values, losses, eta);
}

int mex_mg_select_max(const MgClassEvaluator& evaluator, const LossLedger& ledger, double eta) {
  const int n = ledger.class_size();
  VectorXd values(n), losses(n);
  for (int i = 0; i < n; ++i) {
    values(i) = evaluator.ne_value(i);
    losses(i) = ledger.total_loss(i);
  }
  return mex_select_from_scores(values, losses, eta);
}

int mex_mg_select_min(const MgClassEvaluator& evaluator, const LossLedger& ledger, int f_index,
                      const Policy& mu, double eta) {
  const int n = ledger.class_size();
  VectorXd values(n), losses(n);
  for (int i = 0; i < n; ++i) {
    values(i) = -evaluator.br_value(i, f_index, mu);
    losses(i) = ledger.br_total_loss(i, mu);
  }
  return mex_select_from_scores(values, losses, eta);
}

Policy exploration_policy(const Policy& predicted, ExplorationMode mode, int k,
                          const std::function<int(int)>& schedule) {
  if (mode == ExplorationMode::QType) {
    return predicted;
  }
  const int H = predicted.horizon();
  const int h = schedule ? schedule(k) : (k - 1) % H;
  if (h < 0 || h >= H) {
    throw std::invalid_argument("exploration_policy: override timestep out of range");
  }
  Policy out = predicted;
  const Eigen::Index n_actions = out.prob[h].cols();
  out.prob[h].setConstant(1.0 / static_cast<double>(n_actions));
  return out;
}

RunLog run_mex_mdp(const EpisodicMDP& env, const HypothesisClass& cls, const MexConfig& cfg) {
  if (is_game_kind(cls.kind)) {
    throw std::invalid_argument("run_mex_mdp: game-kind class");
  }
  if (cfg.eta < 0.0) {
    throw std::invalid_argument("run_mex_mdp: eta must be positive");
  }
  RunLog log;
  log.eta = cfg.eta;
  log.seed = cfg.seed;
  log.algorithm = "mex";
  log.realizable_class = cls.realizable && cls.true_index >= 0;

  const PlanResult oracle = plan_optimal(env);
  log.oracle_value = oracle.values.V[0](env.initial_state());

  MdpClassEvaluator evaluator(cls, env);
  LossLedger ledger(cls, env.n_states());
  Rng rng(cfg.seed);
  std::map<int, double> gap_cache;

  double cum_regret = 0.0;
  for (int k = 1; k <= cfg.episodes; ++k) {
    const int f = mex_select(evaluator, ledger, cfg.eta);
    const double objective = mex_objective(f, evaluator, ledger, cfg.eta);
    const Policy& predicted = evaluator.policy(f);

    Policy behavior = exploration_policy(predicted, cfg.exploration_mode, k, cfg.v_type_schedule);
    Episode episode = sample_episode(env, behavior, rng);
    episode.tag.mode = exploration_mode_name(cfg.exploration_mode);
    episode.tag.override_h =
        cfg.exploration_mode == ExplorationMode::VType
            ? (cfg.v_type_schedule ? cfg.v_type_schedule(k) : (k - 1) % env.horizon())
            : -1;

    auto gap_it = gap_cache.find(f);
    if (gap_it == gap_cache.end()) {
      const ValueTable values = policy_evaluation(env, predicted);
      gap_it = gap_cache.emplace(f, log.oracle_value - values.V[0](env.initial_state())).first;
      log.predicted_policies.emplace(f, predicted);
    }
    const double gap = gap_it->second;
    cum_regret += gap;

    EpisodeRecord record;
    record.k = k;
    record.f_index = f;
    record.exploration_mode = episode.tag.mode;
    record.override_h = episode.tag.override_h;
    record.realized_return = episode.total_reward();
    record.gap = gap;
    record.cum_regret = cum_regret;
    record.objective = objective;
    log.records.push_back(record);

    ledger.add_episode(episode);
    log.episodes.push_back(std::move(episode));
  }
  log.ledger_csv = ledger.snapshot_csv();
  return log;
}

RunLog run_mex_mg(const ZeroSumMG& env, const HypothesisClass& cls, const MexConfig& cfg) {
  if (!is_game_kind(cls.kind)) {
    throw std::invalid_argument("run_mex_mg: MDP-kind class");
  }
  if (cfg.eta < 0.0) {
    throw std::invalid_argument("run_mex_mg: eta must be positive");
  }
  RunLog log;
  log.eta = cfg.eta;
  log.seed = cfg.seed;
  log.algorithm = "mex-mg";
  log.realizable_class = cls.realizable && cls.true_index >= 0;

  const NePlanResult oracle = ne_value_iteration(env);
  log.oracle_value = oracle.values.V[0](env.initial_state());

  MgClassEvaluator evaluator(cls, env);
  LossLedger ledger(cls, env.n_states());
  Rng rng(cfg.seed);
  std::map<int, double> gap_cache;  // keyed by max-player member index

  double cum_regret = 0.0;
  for (int k = 1; k <= cfg.episodes; ++k) {
    const int f = mex_mg_select_max(evaluator, ledger, cfg.eta);
    const double objective = evaluator.ne_value(f) - cfg.eta * ledger.total_loss(f);
    const Policy& mu = evaluator.ne_max_policy(f);

    const int g = mex_mg_select_min(evaluator, ledger, f, mu, cfg.eta);
    const Policy nu = evaluator.br_min_policy(g, mu);

    Episode episode = sample_episode(env, JointPolicy{mu, nu}, rng);
    episode.tag.mode = "self-play";

    auto gap_it = gap_cache.find(f);
    if (gap_it == gap_cache.end()) {
      const BrPlanResult response = best_response_value_iteration(env, mu);
      gap_it =
          gap_cache.emplace(f, log.oracle_value - response.values.V[0](env.initial_state())).first;
      log.predicted_policies.emplace(f, mu);
    }
    const double gap = gap_it->second;
    cum_regret += gap;

    EpisodeRecord record;
    record.k = k;
    record.f_index = f;
    record.g_index = g;
    record.exploration_mode = episode.tag.mode;
    record.realized_return = episode.total_reward();
    record.gap = gap;
    record.cum_regret = cum_regret;
    record.objective = objective;
    log.records.push_back(record);

    ledger.add_episode(episode);
    log.episodes.push_back(std::move(episode));
  }
  log.ledger_csv = ledger.snapshot_csv();
  return log;
}

}  // namespace mex
