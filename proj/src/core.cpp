#include "mex/core.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mex {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_stochastic_rows(const MatrixXd& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if ((m.row(i).array() < 0.0).any()) {
      throw std::invalid_argument(std::string(what) + ": negative transition probability");
    }
    if (std::abs(m.row(i).sum() - 1.0) > kRowSumTol) {
      throw std::invalid_argument(std::string(what) + ": transition row does not sum to 1");
    }
  }
}

void check_rewards(const MatrixXd& m, const char* what) {
  if ((m.array() < 0.0).any() || (m.array() > 1.0).any()) {
    throw std::invalid_argument(std::string(what) + ": reward outside [0,1]");
  }
}

int sample_row(const Eigen::Ref<const VectorXd>& weights, Rng& rng) {
  return rng.categorical(weights);
}

}  // namespace

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

int Rng::categorical(const Eigen::Ref<const VectorXd>& weights) {
  int support = 0;
  int last_positive = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      ++support;
      last_positive = static_cast<int>(i);
    }
  }
  if (support == 0) {
    throw std::invalid_argument("categorical: all weights are zero");
  }
  if (support == 1) {
    return last_positive;  // no draw consumed
  }
  const double total = weights.sum();
  const double u = uniform() * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) {
      return static_cast<int>(i);
    }
  }
  return last_positive;
}

EpisodicMDP::EpisodicMDP(int horizon, int n_states, int n_actions,
                         std::vector<MatrixXd> transitions, std::vector<MatrixXd> rewards,
                         int initial_state, double reward_scale, VectorXd start_distribution)
    : horizon_(horizon),
      n_states_(n_states),
      n_actions_(n_actions),
      initial_state_(initial_state),
      reward_scale_(reward_scale),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)),
      start_distribution_(std::move(start_distribution)) {
  if (start_distribution_.size() > 0) {
    if (start_distribution_.size() != n_states_ ||
        (start_distribution_.array() < 0.0).any() ||
        std::abs(start_distribution_.sum() - 1.0) > kRowSumTol) {
      throw std::invalid_argument("EpisodicMDP: start distribution is not a distribution");
    }
  }
  if (horizon_ < 1 || n_states_ < 1 || n_actions_ < 1) {
    throw std::invalid_argument("EpisodicMDP: horizon, n_states, n_actions must be positive");
  }
  if (initial_state_ < 0 || initial_state_ >= n_states_) {
    throw std::invalid_argument("EpisodicMDP: initial state out of range");
  }
  const size_t n_t = transitions_.size();
  const size_t n_r = rewards_.size();
  if ((n_t != 1 && n_t != static_cast<size_t>(horizon_)) ||
      (n_r != 1 && n_r != static_cast<size_t>(horizon_))) {
    throw std::invalid_argument("EpisodicMDP: need one kernel slice per timestep (or one shared)");
  }
  for (const MatrixXd& p : transitions_) {
    if (p.rows() != static_cast<Eigen::Index>(n_states_) * n_actions_ || p.cols() != n_states_) {
      throw std::invalid_argument("EpisodicMDP: transition slice has wrong shape");
    }
    check_stochastic_rows(p, "EpisodicMDP");
  }
  for (const MatrixXd& r : rewards_) {
    if (r.rows() != n_states_ || r.cols() != n_actions_) {
      throw std::invalid_argument("EpisodicMDP: reward slice has wrong shape");
    }
    check_rewards(r, "EpisodicMDP");
  }
}

EpisodicMDP EpisodicMDP::stationary(int horizon, int n_states, int n_actions, MatrixXd transition,
                                    MatrixXd reward, int initial_state, double reward_scale) {
  std::vector<MatrixXd> t;
  t.push_back(std::move(transition));
  std::vector<MatrixXd> r;
  r.push_back(std::move(reward));
  return EpisodicMDP(horizon, n_states, n_actions, std::move(t), std::move(r), initial_state,
                     reward_scale);
}

ZeroSumMG::ZeroSumMG(int horizon, int n_states, int n_actions, int n_min_actions,
                     std::vector<MatrixXd> transitions, std::vector<MatrixXd> rewards,
                     int initial_state)
    : horizon_(horizon),
      n_states_(n_states),
      n_actions_(n_actions),
      n_min_actions_(n_min_actions),
      initial_state_(initial_state),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)) {
  if (horizon_ < 1 || n_states_ < 1 || n_actions_ < 1 || n_min_actions_ < 1) {
    throw std::invalid_argument("ZeroSumMG: all dimensions must be positive");
  }
  if (initial_state_ < 0 || initial_state_ >= n_states_) {
    throw std::invalid_argument("ZeroSumMG: initial state out of range");
  }
  const size_t n_t = transitions_.size();
  const size_t n_r = rewards_.size();
  if ((n_t != 1 && n_t != static_cast<size_t>(horizon_)) ||
      (n_r != 1 && n_r != static_cast<size_t>(horizon_))) {
    throw std::invalid_argument("ZeroSumMG: need one kernel slice per timestep (or one shared)");
  }
  const Eigen::Index n_rows = static_cast<Eigen::Index>(n_states_) * n_actions_ * n_min_actions_;
  for (const MatrixXd& p : transitions_) {
    if (p.rows() != n_rows || p.cols() != n_states_) {
      throw std::invalid_argument("ZeroSumMG: transition slice has wrong shape");
    }
    check_stochastic_rows(p, "ZeroSumMG");
  }
  for (const MatrixXd& r : rewards_) {
    if (r.rows() != n_states_ || r.cols() != static_cast<Eigen::Index>(n_actions_) * n_min_actions_) {
      throw std::invalid_argument("ZeroSumMG: reward slice has wrong shape");
    }
    check_rewards(r, "ZeroSumMG");
  }
}

ZeroSumMG ZeroSumMG::stationary(int horizon, int n_states, int n_actions, int n_min_actions,
                                MatrixXd transition, MatrixXd reward, int initial_state) {
  std::vector<MatrixXd> t;
  t.push_back(std::move(transition));
  std::vector<MatrixXd> r;
  r.push_back(std::move(reward));
  return ZeroSumMG(horizon, n_states, n_actions, n_min_actions, std::move(t), std::move(r),
                   initial_state);
}

Policy uniform_policy(int horizon, int n_states, int n_actions) {
  Policy p;
  p.prob.assign(horizon, MatrixXd::Constant(n_states, n_actions, 1.0 / n_actions));
  return p;
}

Policy deterministic_policy(const std::vector<std::vector<int>>& actions, int n_actions) {
  Policy p;
  p.prob.reserve(actions.size());
  for (const auto& per_state : actions) {
    MatrixXd m = MatrixXd::Zero(static_cast<Eigen::Index>(per_state.size()), n_actions);
    for (size_t s = 0; s < per_state.size(); ++s) {
      m(static_cast<Eigen::Index>(s), per_state[s]) = 1.0;
    }
    p.prob.push_back(std::move(m));
  }
  return p;
}

void validate_policy(const Policy& policy, int horizon, int n_states, int n_actions,
                     const char* what) {
  if (policy.horizon() != horizon) {
    throw std::invalid_argument(std::string(what) + ": policy horizon mismatch");
  }
  for (const MatrixXd& m : policy.prob) {
    if (m.rows() != n_states || m.cols() != n_actions) {
      throw std::invalid_argument(std::string(what) + ": policy shape mismatch");
    }
    for (Eigen::Index s = 0; s < m.rows(); ++s) {
      if ((m.row(s).array() < 0.0).any() || std::abs(m.row(s).sum() - 1.0) > kRowSumTol) {
        throw std::invalid_argument(std::string(what) + ": policy row is not a distribution");
      }
    }
  }
}

double Episode::total_reward() const {
  double total = 0.0;
  for (const Step& step : steps) {
    total += step.reward;
  }
  return total;
}

Episode sample_episode(const EpisodicMDP& env, const Policy& policy, Rng& rng) {
  validate_policy(policy, env.horizon(), env.n_states(), env.n_actions(), "sample_episode");
  Episode episode;
  episode.steps.reserve(env.horizon());
  int x = env.has_start_distribution() ? sample_row(env.start_distribution(), rng)
                                       : env.initial_state();
  for (int h = 0; h < env.horizon(); ++h) {
    const int a = sample_row(policy.prob[h].row(x).transpose(), rng);
    const double r = env.reward_at(h, x, a);
    const int x_next = sample_row(env.transition(h).row(sa_row(x, a, env.n_actions())).transpose(), rng);
    episode.steps.push_back(Step{x, a, -1, r, x_next});
    x = x_next;
  }
  return episode;
}

Episode sample_episode(const ZeroSumMG& env, const JointPolicy& policy, Rng& rng) {
  validate_policy(policy.max_policy, env.horizon(), env.n_states(), env.n_actions(),
                  "sample_episode(max)");
  validate_policy(policy.min_policy, env.horizon(), env.n_states(), env.n_min_actions(),
                  "sample_episode(min)");
  Episode episode;
  episode.steps.reserve(env.horizon());
  int x = env.initial_state();
  for (int h = 0; h < env.horizon(); ++h) {
    const int a = sample_row(policy.max_policy.prob[h].row(x).transpose(), rng);
    const int b = sample_row(policy.min_policy.prob[h].row(x).transpose(), rng);
    const double r = env.reward_at(h, x, a, b);
    const int x_next = sample_row(
        env.transition(h).row(sab_row(x, a, b, env.n_actions(), env.n_min_actions())).transpose(),
        rng);
    episode.steps.push_back(Step{x, a, b, r, x_next});
    x = x_next;
  }
  return episode;
}

ValueTable policy_evaluation(const EpisodicMDP& env, const Policy& policy) {
  validate_policy(policy, env.horizon(), env.n_states(), env.n_actions(), "policy_evaluation");
  const int H = env.horizon();
  const int S = env.n_states();
  const int A = env.n_actions();
  ValueTable table;
  table.V.assign(H + 1, VectorXd::Zero(S));
  table.Q.assign(H, MatrixXd::Zero(S, A));
  for (int h = H - 1; h >= 0; --h) {
    const VectorXd next = env.transition(h) * table.V[h + 1];  // (S*A) vector
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        next_by_sa(next.data(), S, A);
    table.Q[h] = env.reward(h) + next_by_sa;
    for (int s = 0; s < S; ++s) {
      table.V[h](s) = policy.prob[h].row(s).dot(table.Q[h].row(s));
    }
  }
  return table;
}

ValueTable policy_evaluation(const ZeroSumMG& env, const JointPolicy& policy) {
  validate_policy(policy.max_policy, env.horizon(), env.n_states(), env.n_actions(),
                  "policy_evaluation(max)");
  validate_policy(policy.min_policy, env.horizon(), env.n_states(), env.n_min_actions(),
                  "policy_evaluation(min)");
  const int H = env.horizon();
  const int S = env.n_states();
  const int A = env.n_actions();
  const int B = env.n_min_actions();
  ValueTable table;
  table.V.assign(H + 1, VectorXd::Zero(S));
  table.Q.assign(H, MatrixXd::Zero(S, static_cast<Eigen::Index>(A) * B));
  for (int h = H - 1; h >= 0; --h) {
    const VectorXd next = env.transition(h) * table.V[h + 1];  // (S*A*B) vector
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        next_by_sab(next.data(), S, static_cast<Eigen::Index>(A) * B);
    table.Q[h] = env.reward(h) + next_by_sab;
    for (int s = 0; s < S; ++s) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        for (int b = 0; b < B; ++b) {
          v += policy.max_policy.prob[h](s, a) * policy.min_policy.prob[h](s, b) *
               table.Q[h](s, ab_col(a, b, B));
        }
      }
      table.V[h](s) = v;
    }
  }
  return table;
}

namespace {

nlohmann::json flatten(const std::vector<MatrixXd>& slices) {
  std::vector<double> flat;
  size_t total = 0;
  for (const MatrixXd& m : slices) {
    total += static_cast<size_t>(m.size());
  }
  flat.reserve(total);
  for (const MatrixXd& m : slices) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        flat.push_back(m(i, j));
      }
    }
  }
  return nlohmann::json(flat);
}

std::vector<MatrixXd> unflatten(const nlohmann::json& arr, int n_slices, Eigen::Index rows,
                                Eigen::Index cols) {
  const auto flat = arr.get<std::vector<double>>();
  if (flat.size() != static_cast<size_t>(n_slices) * rows * cols) {
    throw std::invalid_argument("environment text: array length mismatch");
  }
  std::vector<MatrixXd> slices(n_slices, MatrixXd(rows, cols));
  size_t idx = 0;
  for (int k = 0; k < n_slices; ++k) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        slices[k](i, j) = flat[idx++];
      }
    }
  }
  return slices;
}

}  // namespace

std::string to_text(const EpisodicMDP& env) {
  nlohmann::json doc;
  doc["type"] = "mdp";
  doc["horizon"] = env.horizon();
  doc["n_states"] = env.n_states();
  doc["n_actions"] = env.n_actions();
  doc["initial_state"] = env.initial_state();
  doc["stationary"] = env.is_stationary();
  doc["reward_scale"] = env.reward_scale();
  std::vector<MatrixXd> t, r;
  const int n = env.is_stationary() ? 1 : env.horizon();
  for (int h = 0; h < n; ++h) {
    t.push_back(env.transition(h));
    r.push_back(env.reward(h));
  }
  doc["transitions"] = flatten(t);
  doc["rewards"] = flatten(r);
  return doc.dump(2);
}

std::string to_text(const ZeroSumMG& env) {
  nlohmann::json doc;
  doc["type"] = "mg";
  doc["horizon"] = env.horizon();
  doc["n_states"] = env.n_states();
  doc["n_actions"] = env.n_actions();
  doc["n_min_actions"] = env.n_min_actions();
  doc["initial_state"] = env.initial_state();
  doc["stationary"] = env.is_stationary();
  std::vector<MatrixXd> t, r;
  const int n = env.is_stationary() ? 1 : env.horizon();
  for (int h = 0; h < n; ++h) {
    t.push_back(env.transition(h));
    r.push_back(env.reward(h));
  }
  doc["transitions"] = flatten(t);
  doc["rewards"] = flatten(r);
  return doc.dump(2);
}

EpisodicMDP mdp_from_text(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.value("type", "mdp") != "mdp") {
    throw std::invalid_argument("environment text: expected type \"mdp\"");
  }
  const int H = doc.at("horizon").get<int>();
  const int S = doc.at("n_states").get<int>();
  const int A = doc.at("n_actions").get<int>();
  const bool stationary = doc.value("stationary", false);
  const int n = stationary ? 1 : H;
  auto t = unflatten(doc.at("transitions"), n, static_cast<Eigen::Index>(S) * A, S);
  auto r = unflatten(doc.at("rewards"), n, S, A);
  return EpisodicMDP(H, S, A, std::move(t), std::move(r), doc.at("initial_state").get<int>(),
                     doc.value("reward_scale", 1.0));
}

ZeroSumMG mg_from_text(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.value("type", "mg") != "mg") {
    throw std::invalid_argument("environment text: expected type \"mg\"");
  }
  const int H = doc.at("horizon").get<int>();
  const int S = doc.at("n_states").get<int>();
  const int A = doc.at("n_actions").get<int>();
  const int B = doc.at("n_min_actions").get<int>();
  const bool stationary = doc.value("stationary", false);
  const int n = stationary ? 1 : H;
  auto t = unflatten(doc.at("transitions"), n, static_cast<Eigen::Index>(S) * A * B, S);
  auto r = unflatten(doc.at("rewards"), n, S, static_cast<Eigen::Index>(A) * B);
  return ZeroSumMG(H, S, A, B, std::move(t), std::move(r), doc.at("initial_state").get<int>());
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << text;
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mex
