#include "mex/losses.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mex {

double hellinger_sq(const Eigen::Ref<const VectorXd>& p, const Eigen::Ref<const VectorXd>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("hellinger_sq: length mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p(i)) - std::sqrt(q(i));
    acc += d * d;
  }
  return 0.5 * acc;
}

double td_residual(const ModelFreeHypothesis& f, int h, const Step& step) {
  const double q = f.is_game()
                       ? f.q(h)(step.state, ab_col(step.action, step.min_action, f.n_min_actions()))
                       : f.q(h)(step.state, step.action);
  return q - step.reward - f.v(h + 1, step.next_state);
}

namespace {

/// sum_s (Q_{h,comp}(x_s,a_s[,b_s]) - r_s - next_values(x'_s))^2 over history.
double direct_branch_sum(const HypothesisClass& cls, int component, const VectorXd& next_values,
                         std::span<const Episode> history, int h) {
  const ModelFreeHypothesis& comp = cls.q_member(component);
  double acc = 0.0;
  for (const Episode& episode : history) {
    const Step& step = episode.steps[h];
    const double q = comp.is_game()
                         ? comp.q(h)(step.state,
                                     ab_col(step.action, step.min_action, comp.n_min_actions()))
                         : comp.q(h)(step.state, step.action);
    const double residual = q - step.reward - next_values(step.next_state);
    acc += residual * residual;
  }
  return acc;
}

double infimum_subtracted(const HypothesisClass& cls, int target_member,
                          const VectorXd& next_values, std::span<const Episode> history, int h) {
  const double own = direct_branch_sum(cls, target_member, next_values, history, h);
  double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cls.size(); ++i) {
    inf = std::min(inf, direct_branch_sum(cls, i, next_values, history, h));
  }
  return own - inf;
}

int member_index_of(const HypothesisClass& cls, const ModelFreeHypothesis& f) {
  for (int i = 0; i < cls.size(); ++i) {
    if (&cls.q_member(i) == &f) {
      return i;
    }
  }
  return -1;
}

}  // namespace

double modelfree_loss(const ModelFreeHypothesis& f, std::span<const Episode> history,
                      const HypothesisClass& cls, int h) {
  if (history.empty()) {
    return 0.0;
  }
  const int idx = member_index_of(cls, f);
  const VectorXd& next_values = f.v_slice(h + 1);
  if (idx >= 0) {
    return infimum_subtracted(cls, idx, next_values, history, h);
  }
  // f outside the class: evaluate its own branch directly, infimum over the class.
  double own = 0.0;
  for (const Episode& episode : history) {
    const Step& step = episode.steps[h];
    const double residual = td_residual(f, h, step);
    own += residual * residual;
  }
  double inf = own;
  for (int i = 0; i < cls.size(); ++i) {
    inf = std::min(inf, direct_branch_sum(cls, i, next_values, history, h));
  }
  return own - inf;
}

double modelbased_nll(const ModelBasedHypothesis& f, std::span<const Episode> history, int h) {
  double acc = 0.0;
  for (const Episode& episode : history) {
    const Step& step = episode.steps[h];
    const Eigen::Index row = f.row_index(step.state, step.action, std::max(step.min_action, 0));
    acc -= f.log_prob(h, row, step.next_state);
  }
  return acc;
}

double mg_ne_loss(const ModelFreeHypothesis& f, std::span<const Episode> history,
                  const HypothesisClass& cls, int h) {
  if (history.empty()) {
    return 0.0;
  }
  const int idx = member_index_of(cls, f);
  if (idx < 0) {
    throw std::invalid_argument("mg_ne_loss: hypothesis is not a class member");
  }
  return infimum_subtracted(cls, idx, f.v_slice(h + 1), history, h);
}

double mg_br_loss(const ModelFreeHypothesis& g, const Policy& mu,
                  std::span<const Episode> history, const HypothesisClass& cls, int h) {
  if (history.empty()) {
    return 0.0;
  }
  const int idx = member_index_of(cls, g);
  if (idx < 0) {
    throw std::invalid_argument("mg_br_loss: hypothesis is not a class member");
  }
  const int S = g.n_states();
  const int A = g.n_actions();
  const int B = g.n_min_actions();
  VectorXd next_values = VectorXd::Zero(S);
  if (h + 1 < g.horizon()) {
    for (int s = 0; s < S; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (int b = 0; b < B; ++b) {
        double v = 0.0;
        for (int a = 0; a < A; ++a) {
          v += mu.prob[h + 1](s, a) * g.q(h + 1)(s, ab_col(a, b, B));
        }
        best = std::min(best, v);
      }
      next_values(s) = best;
    }
  }
  return infimum_subtracted(cls, idx, next_values, history, h);
}

double discrepancy_modelfree(const ModelFreeHypothesis& f, const ModelFreeHypothesis* context,
                             const EpisodicMDP& env, const MatrixXd& rho, int h) {
  (void)context;  // the chosen residual is context-independent
  if (f.is_game()) {
    throw std::invalid_argument("discrepancy_modelfree: game hypothesis");
  }
  const int S = env.n_states();
  const int A = env.n_actions();
  const VectorXd expected_next = env.transition(h) * f.v_slice(h + 1);
  double acc = 0.0;
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double w = rho(s, a);
      if (w == 0.0) continue;
      const double residual =
          f.q(h)(s, a) - env.reward_at(h, s, a) - expected_next(sa_row(s, a, A));
      acc += w * residual * residual;
    }
  }
  return acc;
}

double discrepancy_modelbased(const ModelBasedHypothesis& f, const EpisodicMDP& env,
                              const MatrixXd& rho, int h) {
  const int S = env.n_states();
  const int A = env.n_actions();
  double acc = 0.0;
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const double w = rho(s, a);
      if (w == 0.0) continue;
      const Eigen::Index row = sa_row(s, a, A);
      acc += w * hellinger_sq(f.kernel(h).row(row).transpose(),
                              env.transition(h).row(row).transpose());
    }
  }
  return acc;
}

double discrepancy_modelbased(const ModelBasedHypothesis& f, const ZeroSumMG& env,
                              const MatrixXd& rho, int h) {
  const int S = env.n_states();
  const int A = env.n_actions();
  const int B = env.n_min_actions();
  double acc = 0.0;
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      for (int b = 0; b < B; ++b) {
        const double w = rho(s, ab_col(a, b, B));
        if (w == 0.0) continue;
        const Eigen::Index row = sab_row(s, a, b, A, B);
        acc += w * hellinger_sq(f.kernel(h).row(row).transpose(),
                                env.transition(h).row(row).transpose());
      }
    }
  }
  return acc;
}

LossLedger::LossLedger(const HypothesisClass& cls, int n_states)
    : cls_(&cls), n_states_(n_states) {
  if (cls.size() == 0) {
    throw std::invalid_argument("LossLedger: empty class");
  }
  if (is_model_based(cls.kind)) {
    horizon_ = cls.model_members.front().horizon();
    nll_ = MatrixXd::Zero(cls.size(), horizon_);
  } else {
    horizon_ = cls.q_members.front().horizon();
    sum_a2_.assign(horizon_, VectorXd::Zero(cls.size()));
    sum_a_next_.assign(horizon_, MatrixXd::Zero(cls.size(), n_states_));
  }
}

int LossLedger::class_size() const { return cls_->size(); }

void LossLedger::add_episode(const Episode& episode) {
  if (static_cast<int>(episode.steps.size()) != horizon_) {
    throw std::invalid_argument("LossLedger: episode length mismatch");
  }
  const int n = cls_->size();
  if (is_model_based(cls_->kind)) {
    for (int h = 0; h < horizon_; ++h) {
      const Step& step = episode.steps[h];
      for (int i = 0; i < n; ++i) {
        const ModelBasedHypothesis& m = cls_->model_member(i);
        const Eigen::Index row = m.row_index(step.state, step.action, std::max(step.min_action, 0));
        nll_(i, h) -= m.log_prob(h, row, step.next_state);
      }
    }
  } else {
    for (int h = 0; h < horizon_; ++h) {
      const Step& step = episode.steps[h];
      for (int i = 0; i < n; ++i) {
        const ModelFreeHypothesis& m = cls_->q_member(i);
        const double q =
            m.is_game() ? m.q(h)(step.state, ab_col(step.action, step.min_action, m.n_min_actions()))
                        : m.q(h)(step.state, step.action);
        const double a_val = q - step.reward;
        sum_a2_[h](i) += a_val * a_val;
        sum_a_next_[h](i, step.next_state) += a_val;
      }
    }
  }
  ++episodes_;
}

double LossLedger::residual_branch(int component, const VectorXd& next_values, int h) const {
  // sum_s A_s(component)^2 - 2 sum_s A_s(component) B_s; the B^2 term is
  // shared by every component and cancels in the infimum subtraction.
  return sum_a2_[h](component) - 2.0 * sum_a_next_[h].row(component).dot(next_values);
}

double LossLedger::loss(int member, int h) const {
  if (is_model_based(cls_->kind)) {
    return nll_(member, h);
  }
  const VectorXd& next_values = cls_->q_member(member).v_slice(h + 1);
  const double own = residual_branch(member, next_values, h);
  double inf = own;
  for (int i = 0; i < cls_->size(); ++i) {
    inf = std::min(inf, residual_branch(i, next_values, h));
  }
  return own - inf;
}

double LossLedger::total_loss(int member) const {
  double acc = 0.0;
  for (int h = 0; h < horizon_; ++h) {
    acc += loss(member, h);
  }
  return acc;
}

VectorXd LossLedger::br_next_values(int member, const Policy& mu, int h) const {
  const ModelFreeHypothesis& g = cls_->q_member(member);
  const int S = g.n_states();
  const int A = g.n_actions();
  const int B = g.n_min_actions();
  VectorXd values = VectorXd::Zero(S);
  if (h + 1 >= horizon_) {
    return values;
  }
  for (int s = 0; s < S; ++s) {
    double best = std::numeric_limits<double>::infinity();
    for (int b = 0; b < B; ++b) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        v += mu.prob[h + 1](s, a) * g.q(h + 1)(s, ab_col(a, b, B));
      }
      best = std::min(best, v);
    }
    values(s) = best;
  }
  return values;
}

double LossLedger::br_loss(int member, const Policy& mu, int h) const {
  if (is_model_based(cls_->kind)) {
    return nll_(member, h);  // likelihood loss is policy-independent
  }
  const VectorXd next_values = br_next_values(member, mu, h);
  const double own = residual_branch(member, next_values, h);
  double inf = own;
  for (int i = 0; i < cls_->size(); ++i) {
    inf = std::min(inf, residual_branch(i, next_values, h));
  }
  return own - inf;
}

double LossLedger::br_total_loss(int member, const Policy& mu) const {
  double acc = 0.0;
  for (int h = 0; h < horizon_; ++h) {
    acc += br_loss(member, mu, h);
  }
  return acc;
}

std::string LossLedger::snapshot_csv() const {
  std::ostringstream out;
  out << "k,h,hypothesis_index,L_value\n";
  char buf[64];
  for (int h = 0; h < horizon_; ++h) {
    for (int i = 0; i < cls_->size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", loss(i, h));
      out << episodes_ << ',' << (h + 1) << ',' << i << ',' << buf << '\n';
    }
  }
  return out.str();
}

}  // namespace mex
