#include "mex/hypothesis.hpp"

#include "mex/matrix_game.hpp"
#include "mex/planner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mex {

namespace {

constexpr double kBoundTol = 1e-9;

void check_q_range(const std::vector<MatrixXd>& q, double bound) {
  for (const MatrixXd& slice : q) {
    if ((slice.array() < -kBoundTol).any() || (slice.array() > bound + kBoundTol).any()) {
      throw std::invalid_argument("ModelFreeHypothesis: Q outside [0, bound]");
    }
  }
}

std::vector<MatrixXd> floored_logs(const std::vector<MatrixXd>& kernels) {
  std::vector<MatrixXd> logs;
  logs.reserve(kernels.size());
  for (const MatrixXd& k : kernels) {
    MatrixXd floored = k.cwiseMax(ModelBasedHypothesis::probability_floor);
    for (Eigen::Index i = 0; i < floored.rows(); ++i) {
      floored.row(i) /= floored.row(i).sum();
    }
    logs.push_back(floored.array().log().matrix());
  }
  return logs;
}

void check_kernel_rows(const std::vector<MatrixXd>& kernels, Eigen::Index rows,
                       Eigen::Index cols) {
  for (const MatrixXd& k : kernels) {
    if (k.rows() != rows || k.cols() != cols) {
      throw std::invalid_argument("ModelBasedHypothesis: kernel slice has wrong shape");
    }
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      if ((k.row(i).array() < 0.0).any() || std::abs(k.row(i).sum() - 1.0) > 1e-12) {
        throw std::invalid_argument("ModelBasedHypothesis: kernel row is not a distribution");
      }
    }
  }
}

}  // namespace

std::string kind_name(HypothesisKind k) {
  switch (k) {
    case HypothesisKind::ModelFreeMdp: return "model_free_mdp";
    case HypothesisKind::ModelFreeMg: return "model_free_mg";
    case HypothesisKind::ModelBasedMdp: return "model_based_mdp";
    case HypothesisKind::ModelBasedMg: return "model_based_mg";
  }
  return "unknown";
}

HypothesisKind kind_from_name(const std::string& name) {
  if (name == "model_free_mdp") return HypothesisKind::ModelFreeMdp;
  if (name == "model_free_mg") return HypothesisKind::ModelFreeMg;
  if (name == "model_based_mdp") return HypothesisKind::ModelBasedMdp;
  if (name == "model_based_mg") return HypothesisKind::ModelBasedMg;
  throw std::invalid_argument("unknown hypothesis kind: " + name);
}

ModelFreeHypothesis ModelFreeHypothesis::for_mdp(std::vector<MatrixXd> q, double bound) {
  if (q.empty()) {
    throw std::invalid_argument("ModelFreeHypothesis: empty Q");
  }
  ModelFreeHypothesis f;
  f.game_ = false;
  f.n_actions_ = static_cast<int>(q.front().cols());
  f.n_min_actions_ = 1;
  f.bound_ = bound > 0.0 ? bound : static_cast<double>(q.size());
  check_q_range(q, f.bound_);
  f.q_ = std::move(q);

  const int H = f.horizon();
  const int S = f.n_states();
  f.v_.assign(H + 1, VectorXd::Zero(S));
  f.policy_.prob.assign(H, MatrixXd::Zero(S, f.n_actions_));
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      f.v_[h](s) = f.q_[h].row(s).maxCoeff();
      f.policy_.prob[h](s, argmax_row(f.q_[h].row(s))) = 1.0;
    }
  }
  return f;
}

ModelFreeHypothesis ModelFreeHypothesis::for_mg(std::vector<MatrixXd> q, int n_actions,
                                                int n_min_actions, double bound) {
  if (q.empty()) {
    throw std::invalid_argument("ModelFreeHypothesis: empty Q");
  }
  if (q.front().cols() != static_cast<Eigen::Index>(n_actions) * n_min_actions) {
    throw std::invalid_argument("ModelFreeHypothesis: Q slice does not match (A, B)");
  }
  ModelFreeHypothesis f;
  f.game_ = true;
  f.n_actions_ = n_actions;
  f.n_min_actions_ = n_min_actions;
  f.bound_ = bound > 0.0 ? bound : static_cast<double>(q.size());
  check_q_range(q, f.bound_);
  f.q_ = std::move(q);

  const int H = f.horizon();
  const int S = f.n_states();
  f.v_.assign(H + 1, VectorXd::Zero(S));
  f.policy_.prob.assign(H, MatrixXd::Zero(S, n_actions));
  MatrixXd slice(n_actions, n_min_actions);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < n_actions; ++a) {
        for (int b = 0; b < n_min_actions; ++b) {
          slice(a, b) = f.q_[h](s, ab_col(a, b, n_min_actions));
        }
      }
      MatrixGameSolution sol = solve_matrix_game(slice);
      f.v_[h](s) = sol.value;
      f.policy_.prob[h].row(s) = sol.row_strategy.transpose();
    }
  }
  return f;
}

const Policy& ModelFreeHypothesis::greedy() const {
  if (game_) {
    throw std::invalid_argument("greedy(): game hypotheses use equilibrium strategies");
  }
  return policy_;
}

const Policy& ModelFreeHypothesis::ne_max_policy() const {
  if (!game_) {
    throw std::invalid_argument("ne_max_policy(): not a game hypothesis");
  }
  return policy_;
}

ModelBasedHypothesis ModelBasedHypothesis::for_mdp(int horizon, int n_states, int n_actions,
                                                   std::vector<MatrixXd> kernels) {
  if (kernels.size() != 1 && kernels.size() != static_cast<size_t>(horizon)) {
    throw std::invalid_argument("ModelBasedHypothesis: need one kernel slice per timestep");
  }
  check_kernel_rows(kernels, static_cast<Eigen::Index>(n_states) * n_actions, n_states);
  ModelBasedHypothesis f;
  f.game_ = false;
  f.horizon_ = horizon;
  f.n_states_ = n_states;
  f.n_actions_ = n_actions;
  f.n_min_actions_ = 1;
  f.log_kernels_ = floored_logs(kernels);
  f.kernels_ = std::move(kernels);
  return f;
}

ModelBasedHypothesis ModelBasedHypothesis::for_mg(int horizon, int n_states, int n_actions,
                                                  int n_min_actions,
                                                  std::vector<MatrixXd> kernels) {
  if (kernels.size() != 1 && kernels.size() != static_cast<size_t>(horizon)) {
    throw std::invalid_argument("ModelBasedHypothesis: need one kernel slice per timestep");
  }
  check_kernel_rows(kernels, static_cast<Eigen::Index>(n_states) * n_actions * n_min_actions,
                    n_states);
  ModelBasedHypothesis f;
  f.game_ = true;
  f.horizon_ = horizon;
  f.n_states_ = n_states;
  f.n_actions_ = n_actions;
  f.n_min_actions_ = n_min_actions;
  f.log_kernels_ = floored_logs(kernels);
  f.kernels_ = std::move(kernels);
  return f;
}

Policy greedy_policy_of(const ModelFreeHypothesis& f) {
  if (f.is_game()) {
    throw std::invalid_argument(
        "greedy_policy_of: game-kind hypothesis; use the planner equilibrium solves");
  }
  return f.greedy();
}

namespace {

struct KernelShape {
  int horizon, n_states, n_actions, n_min_actions;
  bool game;
  bool stationary;
};

std::vector<MatrixXd> env_kernels(const EpisodicMDP& env) {
  std::vector<MatrixXd> k;
  const int n = env.is_stationary() ? 1 : env.horizon();
  for (int h = 0; h < n; ++h) k.push_back(env.transition(h));
  return k;
}

std::vector<MatrixXd> env_kernels(const ZeroSumMG& env) {
  std::vector<MatrixXd> k;
  const int n = env.is_stationary() ? 1 : env.horizon();
  for (int h = 0; h < n; ++h) k.push_back(env.transition(h));
  return k;
}

KernelShape shape_of(const EpisodicMDP& env) {
  return {env.horizon(), env.n_states(), env.n_actions(), 1, false, env.is_stationary()};
}

KernelShape shape_of(const ZeroSumMG& env) {
  return {env.horizon(), env.n_states(), env.n_actions(), env.n_min_actions(), true,
          env.is_stationary()};
}

/// States whose best-case reward is near the maximum, together with their
/// one-step predecessors; used to build pessimistic variants.
template <typename Env>
std::pair<std::set<int>, std::set<int>> reward_targets_and_predecessors(const Env& env) {
  const int S = env.n_states();
  VectorXd best_reward = VectorXd::Zero(S);
  const int n_slices = env.is_stationary() ? 1 : env.horizon();
  for (int h = 0; h < n_slices; ++h) {
    const MatrixXd& r = env.reward(h);
    for (int s = 0; s < S; ++s) {
      best_reward(s) = std::max(best_reward(s), r.row(s).maxCoeff());
    }
  }
  const double hi = best_reward.maxCoeff();
  const double lo = best_reward.minCoeff();
  std::set<int> targets;
  for (int s = 0; s < S; ++s) {
    if (best_reward(s) >= lo + 0.5 * (hi - lo) && hi > lo) {
      targets.insert(s);
    }
  }
  std::set<int> predecessors;
  for (int h = 0; h < n_slices; ++h) {
    const MatrixXd& p = env.transition(h);
    for (Eigen::Index row = 0; row < p.rows(); ++row) {
      const int s = static_cast<int>(row / (p.rows() / S));
      if (targets.count(s)) continue;
      for (int t : targets) {
        if (p(row, t) > 1e-12) {
          predecessors.insert(s);
          break;
        }
      }
    }
  }
  predecessors.erase(env.initial_state());
  return {targets, predecessors};
}

ModelBasedHypothesis make_hypothesis(const KernelShape& shape, std::vector<MatrixXd> kernels) {
  if (shape.game) {
    return ModelBasedHypothesis::for_mg(shape.horizon, shape.n_states, shape.n_actions,
                                        shape.n_min_actions, std::move(kernels));
  }
  return ModelBasedHypothesis::for_mdp(shape.horizon, shape.n_states, shape.n_actions,
                                       std::move(kernels));
}

bool same_kernels(const ModelBasedHypothesis& a, const ModelBasedHypothesis& b) {
  if (a.is_stationary() != b.is_stationary() || a.horizon() != b.horizon()) return false;
  const int n = a.is_stationary() ? 1 : a.horizon();
  for (int h = 0; h < n; ++h) {
    if (a.kernel(h) != b.kernel(h)) return false;
  }
  return true;
}

template <typename Env>
HypothesisClass enumerate_tabular_impl(const Env& env, const TabularClassOptions& options) {
  if (options.n_members < 1) {
    throw std::invalid_argument("enumerate_tabular_model_class: n_members must be >= 1");
  }
  if (options.size_cap < 1) {
    throw std::invalid_argument("enumerate_tabular_model_class: size_cap must be >= 1");
  }
  const KernelShape shape = shape_of(env);
  const std::vector<MatrixXd> truth = env_kernels(env);
  Rng rng(options.seed);

  std::vector<ModelBasedHypothesis> members;
  const int n_alternates = options.n_members - 1;
  const int n_sticky = std::min(options.n_sticky, n_alternates);
  const int n_dense = n_alternates - n_sticky;

  if (n_sticky > 0) {
    auto [targets, predecessors] = reward_targets_and_predecessors(env);
    std::vector<int> extra_pool;
    for (int s = 0; s < shape.n_states; ++s) {
      if (!targets.count(s) && !predecessors.count(s) && s != env.initial_state()) {
        extra_pool.push_back(s);
      }
    }
    for (int j = 0; j < n_sticky; ++j) {
      std::set<int> sticky(predecessors.begin(), predecessors.end());
      for (int e = 0; e < options.sticky_extra_states && !extra_pool.empty(); ++e) {
        const int pick = static_cast<int>(rng.uniform() * extra_pool.size());
        sticky.insert(extra_pool[std::min<int>(pick, extra_pool.size() - 1)]);
      }
      std::vector<MatrixXd> kernels = truth;
      const Eigen::Index rows_per_state = truth[0].rows() / shape.n_states;
      for (MatrixXd& k : kernels) {
        for (int s : sticky) {
          for (Eigen::Index r = 0; r < rows_per_state; ++r) {
            k.row(s * rows_per_state + r).setZero();
            k(s * rows_per_state + r, s) = 1.0;
          }
        }
      }
      members.push_back(make_hypothesis(shape, std::move(kernels)));
    }
  }

  for (int j = 0; j < n_dense; ++j) {
    double magnitude = options.perturbation;
    if (options.min_perturbation > 0.0 && n_dense > 1) {
      const double t = static_cast<double>(j) / (n_dense - 1);
      magnitude = options.perturbation *
                  std::pow(options.min_perturbation / options.perturbation, t);
    }
    std::vector<MatrixXd> kernels = truth;
    if (magnitude > 0.0) {
      // Pull each row toward a random target state. Targets with high
      // optimal value make the member optimistic, low-value targets make it
      // pessimistic, so a mix of both kinds appears at every magnitude.
      for (MatrixXd& k : kernels) {
        for (Eigen::Index r = 0; r < k.rows(); ++r) {
          const int target = std::min<int>(static_cast<int>(rng.uniform() * shape.n_states),
                                           shape.n_states - 1);
          k(r, target) += magnitude;
          k.row(r) /= 1.0 + magnitude;
        }
      }
    }
    members.push_back(make_hypothesis(shape, std::move(kernels)));
  }

  members.push_back(make_hypothesis(shape, truth));  // true model last

  HypothesisClass cls;
  cls.kind = shape.game ? HypothesisKind::ModelBasedMg : HypothesisKind::ModelBasedMdp;
  cls.realizable = true;
  for (ModelBasedHypothesis& candidate : members) {
    bool duplicate = false;
    for (const ModelBasedHypothesis& kept : cls.model_members) {
      if (same_kernels(candidate, kept)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      cls.model_members.push_back(std::move(candidate));
    }
  }
  // Locate the true model (it survives dedup, possibly as an earlier copy).
  const ModelBasedHypothesis truth_hyp = make_hypothesis(shape, env_kernels(env));
  for (int i = 0; i < cls.size(); ++i) {
    if (same_kernels(cls.model_members[i], truth_hyp)) {
      cls.true_index = i;
      break;
    }
  }

  if (cls.size() > options.size_cap) {
    cls.truncated = true;
    std::vector<ModelBasedHypothesis> kept;
    for (int i = 0; i < options.size_cap - 1; ++i) {
      kept.push_back(std::move(cls.model_members[i]));
    }
    if (cls.true_index >= options.size_cap - 1) {
      kept.push_back(std::move(cls.model_members[cls.true_index]));
      cls.true_index = static_cast<int>(kept.size()) - 1;
    } else {
      kept.push_back(std::move(cls.model_members[options.size_cap - 1]));
    }
    cls.model_members = std::move(kept);
  }
  return cls;
}

}  // namespace

HypothesisClass enumerate_tabular_model_class(const EpisodicMDP& env,
                                              const TabularClassOptions& options) {
  return enumerate_tabular_impl(env, options);
}

HypothesisClass enumerate_tabular_model_class(const ZeroSumMG& env,
                                              const TabularClassOptions& options) {
  return enumerate_tabular_impl(env, options);
}

HypothesisClass modelfree_class_from_models(const HypothesisClass& models,
                                            const EpisodicMDP& env) {
  if (models.kind != HypothesisKind::ModelBasedMdp) {
    throw std::invalid_argument("modelfree_class_from_models: expected a model-based MDP class");
  }
  HypothesisClass cls;
  cls.kind = HypothesisKind::ModelFreeMdp;
  cls.true_index = models.true_index;
  cls.realizable = models.realizable;
  cls.truncated = models.truncated;
  for (const ModelBasedHypothesis& model : models.model_members) {
    PlanResult plan = plan_optimal(model, env);
    cls.q_members.push_back(
        ModelFreeHypothesis::for_mdp(std::move(plan.values.Q), env.horizon()));
  }
  return cls;
}

HypothesisClass modelfree_class_from_models(const HypothesisClass& models, const ZeroSumMG& env) {
  if (models.kind != HypothesisKind::ModelBasedMg) {
    throw std::invalid_argument("modelfree_class_from_models: expected a model-based game class");
  }
  HypothesisClass cls;
  cls.kind = HypothesisKind::ModelFreeMg;
  cls.true_index = models.true_index;
  cls.realizable = models.realizable;
  cls.truncated = models.truncated;
  for (const ModelBasedHypothesis& model : models.model_members) {
    NePlanResult plan = ne_value_iteration(model, env);
    cls.q_members.push_back(ModelFreeHypothesis::for_mg(
        std::move(plan.values.Q), env.n_actions(), env.n_min_actions(), env.horizon()));
  }
  return cls;
}

std::vector<MatrixXd> LinearMixtureFeatures::realize(const VectorXd& theta) const {
  std::vector<MatrixXd> kernels;
  kernels.reserve(phi.size());
  const Eigen::Index rows =
      static_cast<Eigen::Index>(n_states) * n_actions * n_min_actions;
  for (const MatrixXd& slice_phi : phi) {
    VectorXd flat = slice_phi * theta;
    MatrixXd k(rows, n_states);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int c = 0; c < n_states; ++c) {
        k(r, c) = flat(r * n_states + c);
      }
    }
    kernels.push_back(std::move(k));
  }
  return kernels;
}

HypothesisClass build_linear_mixture_class(const LinearMixtureFeatures& features,
                                           std::vector<VectorXd> theta_grid,
                                           const std::optional<VectorXd>& theta_star) {
  if (theta_star) {
    bool present = false;
    for (const VectorXd& theta : theta_grid) {
      if (theta.size() == theta_star->size() && theta == *theta_star) {
        present = true;
        break;
      }
    }
    if (!present) {
      theta_grid.push_back(*theta_star);
    }
  }

  HypothesisClass cls;
  cls.kind = features.game ? HypothesisKind::ModelBasedMg : HypothesisKind::ModelBasedMdp;
  for (const VectorXd& theta : theta_grid) {
    if (theta.size() != features.d) {
      throw std::invalid_argument("build_linear_mixture_class: theta dimension mismatch");
    }
    std::vector<MatrixXd> kernels = features.realize(theta);
    bool valid = true;
    for (MatrixXd& k : kernels) {
      for (Eigen::Index r = 0; r < k.rows() && valid; ++r) {
        if ((k.row(r).array() < -1e-12).any()) {
          valid = false;
          break;
        }
        const double sum = k.row(r).sum();
        if (std::abs(sum - 1.0) > 1e-9) {
          valid = false;
          break;
        }
        if ((k.row(r).array() < 0.0).any()) {
          k.row(r) = k.row(r).cwiseMax(0.0);
          k.row(r) /= k.row(r).sum();
        } else if (std::abs(sum - 1.0) > 1e-12) {
          k.row(r) /= sum;
        }
      }
      if (!valid) break;
    }
    if (!valid) {
      continue;
    }
    const bool is_star = theta_star && theta.size() == theta_star->size() && theta == *theta_star;
    cls.model_members.push_back(features.game
                                    ? ModelBasedHypothesis::for_mg(
                                          features.horizon, features.n_states, features.n_actions,
                                          features.n_min_actions, std::move(kernels))
                                    : ModelBasedHypothesis::for_mdp(features.horizon,
                                                                    features.n_states,
                                                                    features.n_actions,
                                                                    std::move(kernels)));
    cls.linear_thetas.push_back(theta);
    if (is_star) {
      cls.true_index = cls.size() - 1;
      cls.realizable = true;
    }
  }
  if (cls.model_members.empty()) {
    throw std::invalid_argument(
        "build_linear_mixture_class: no grid point induces valid transition rows");
  }
  return cls;
}

namespace {

nlohmann::json flat_slices(const std::vector<MatrixXd>& slices) {
  std::vector<double> flat;
  for (const MatrixXd& m : slices) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        flat.push_back(m(i, j));
      }
    }
  }
  return nlohmann::json(flat);
}

std::vector<MatrixXd> slices_from_flat(const std::vector<double>& flat, int n_slices,
                                       Eigen::Index rows, Eigen::Index cols) {
  std::vector<MatrixXd> out(n_slices, MatrixXd(rows, cols));
  size_t idx = 0;
  for (int k = 0; k < n_slices; ++k) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        out[k](i, j) = flat[idx++];
      }
    }
  }
  return out;
}

}  // namespace

std::string to_text(const HypothesisClass& cls) {
  nlohmann::json doc;
  doc["type"] = "hypothesis_class";
  doc["kind"] = kind_name(cls.kind);
  doc["true_index"] = cls.true_index;
  doc["realizable"] = cls.realizable;
  doc["truncated"] = cls.truncated;
  nlohmann::json members = nlohmann::json::array();
  if (is_model_based(cls.kind)) {
    const ModelBasedHypothesis& first = cls.model_members.front();
    doc["horizon"] = first.horizon();
    doc["n_states"] = first.n_states();
    doc["n_actions"] = first.n_actions();
    doc["n_min_actions"] = first.n_min_actions();
    doc["stationary"] = first.is_stationary();
    for (const ModelBasedHypothesis& m : cls.model_members) {
      std::vector<MatrixXd> slices;
      const int n = m.is_stationary() ? 1 : m.horizon();
      for (int h = 0; h < n; ++h) slices.push_back(m.kernel(h));
      members.push_back(flat_slices(slices));
    }
  } else {
    const ModelFreeHypothesis& first = cls.q_members.front();
    doc["horizon"] = first.horizon();
    doc["n_states"] = first.n_states();
    doc["n_actions"] = first.n_actions();
    doc["n_min_actions"] = first.n_min_actions();
    doc["stationary"] = false;
    doc["bound"] = first.bound();
    for (const ModelFreeHypothesis& m : cls.q_members) {
      std::vector<MatrixXd> slices;
      for (int h = 0; h < m.horizon(); ++h) slices.push_back(m.q(h));
      members.push_back(flat_slices(slices));
    }
  }
  doc["members"] = members;
  if (!cls.linear_thetas.empty()) {
    nlohmann::json thetas = nlohmann::json::array();
    for (const VectorXd& t : cls.linear_thetas) {
      thetas.push_back(std::vector<double>(t.data(), t.data() + t.size()));
    }
    doc["thetas"] = thetas;
  }
  return doc.dump(2);
}

HypothesisClass class_from_text(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.value("type", "") != "hypothesis_class") {
    throw std::invalid_argument("class text: expected type \"hypothesis_class\"");
  }
  HypothesisClass cls;
  cls.kind = kind_from_name(doc.at("kind").get<std::string>());
  cls.true_index = doc.value("true_index", -1);
  cls.realizable = doc.value("realizable", false);
  cls.truncated = doc.value("truncated", false);
  const int H = doc.at("horizon").get<int>();
  const int S = doc.at("n_states").get<int>();
  const int A = doc.at("n_actions").get<int>();
  const int B = doc.value("n_min_actions", 1);
  const bool stationary = doc.value("stationary", false);
  const bool game = is_game_kind(cls.kind);
  for (const auto& member : doc.at("members")) {
    const auto flat = member.get<std::vector<double>>();
    if (is_model_based(cls.kind)) {
      const Eigen::Index rows = static_cast<Eigen::Index>(S) * A * (game ? B : 1);
      auto slices = slices_from_flat(flat, stationary ? 1 : H, rows, S);
      cls.model_members.push_back(
          game ? ModelBasedHypothesis::for_mg(H, S, A, B, std::move(slices))
               : ModelBasedHypothesis::for_mdp(H, S, A, std::move(slices)));
    } else {
      const double bound = doc.value("bound", static_cast<double>(H));
      const Eigen::Index cols = static_cast<Eigen::Index>(A) * (game ? B : 1);
      auto slices = slices_from_flat(flat, H, S, cols);
      cls.q_members.push_back(game
                                  ? ModelFreeHypothesis::for_mg(std::move(slices), A, B, bound)
                                  : ModelFreeHypothesis::for_mdp(std::move(slices), bound));
    }
  }
  if (doc.contains("thetas")) {
    for (const auto& t : doc.at("thetas")) {
      const auto v = t.get<std::vector<double>>();
      cls.linear_thetas.push_back(Eigen::Map<const VectorXd>(v.data(), v.size()));
    }
  }
  return cls;
}

}  // namespace mex
