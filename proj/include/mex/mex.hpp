#pragma once

#include "mex/core.hpp"
#include "mex/hypothesis.hpp"
#include "mex/losses.hpp"
#include "mex/planner.hpp"

#include <functional>
#include <map>
#include <memory>

namespace mex {

enum class ExplorationMode { QType, VType };

std::string exploration_mode_name(ExplorationMode mode);

struct MexConfig {
  double eta = 0.1;
  ExplorationMode exploration_mode = ExplorationMode::QType;
  int episodes = 1000;
  std::uint64_t seed = 0;
  /// Maps the 1-based episode index to the 0-based override timestep for
  /// v-type exploration; round-robin (k-1) mod H when unset.
  std::function<int(int)> v_type_schedule;
};

struct EpisodeRecord {
  int k = 0;
  int f_index = -1;
  int g_index = -1;  // min-player hypothesis; -1 outside games
  std::string exploration_mode;
  int override_h = -1;
  double realized_return = 0.0;
  double gap = 0.0;
  double cum_regret = 0.0;
  double objective = 0.0;
};

struct RunLog {
  std::vector<EpisodeRecord> records;
  std::vector<Episode> episodes;
  std::map<int, Policy> predicted_policies;  // per distinct selected index
  double eta = 0.0;
  std::uint64_t seed = 0;
  double oracle_value = 0.0;  // V_1^* at the initial state
  bool realizable_class = true;
  std::string algorithm = "mex";
  std::string ledger_csv;  // final ledger snapshot

  double final_cum_regret() const {
    return records.empty() ? 0.0 : records.back().cum_regret;
  }
};

/// Caches per-member optimal values and policies of an MDP hypothesis class
/// against a fixed environment (plans lazily for model-based members).
class MdpClassEvaluator {
 public:
  MdpClassEvaluator(const HypothesisClass& cls, const EpisodicMDP& env);

  double value(int member) const;          // V_{1,f}(x1)
  const Policy& policy(int member) const;  // pi_f

 private:
  void ensure_plan(int member) const;

  const HypothesisClass* cls_;
  const EpisodicMDP* env_;
  mutable std::vector<char> planned_;
  mutable std::vector<double> values_;
  mutable std::vector<Policy> policies_;
};

/// Same for game classes: equilibrium values/policies per member plus
/// best-response values against a fixed max-player policy.
class MgClassEvaluator {
 public:
  MgClassEvaluator(const HypothesisClass& cls, const ZeroSumMG& env);

  double ne_value(int member) const;
  const Policy& ne_max_policy(int member) const;

  /// V_{1,g}^{mu,+}(x1): best-response value of member g against mu, where
  /// mu is identified by the max-player member index for caching.
  double br_value(int member, int mu_member, const Policy& mu) const;
  Policy br_min_policy(int member, const Policy& mu) const;

 private:
  void ensure_ne(int member) const;

  const HypothesisClass* cls_;
  const ZeroSumMG* env_;
  mutable std::vector<char> solved_;
  mutable std::vector<double> values_;
  mutable std::vector<Policy> max_policies_;
  mutable std::map<std::pair<int, int>, double> br_values_;
};

/// Composite score V_{1,f}(x1) - eta * sum_h L_h^{k-1}(f).
double mex_objective(int member, const MdpClassEvaluator& evaluator, const LossLedger& ledger,
                     double eta);

/// Argmax of the composite score, lowest index on ties.
int mex_select(const MdpClassEvaluator& evaluator, const LossLedger& ledger, double eta);

/// Pure selection rule on precomputed (value, total loss) columns.
int mex_select_from_scores(const VectorXd& values, const VectorXd& total_losses, double eta);

/// Max-player selection: equilibrium value against the shared ledger.
int mex_mg_select_max(const MgClassEvaluator& evaluator, const LossLedger& ledger, double eta);

/// Min-player selection after the max-player policy is fixed:
/// argmax of -V_{1,g}^{mu,+}(x1) - eta * sum_h L_{h,mu}^{k-1}(g).
int mex_mg_select_min(const MgClassEvaluator& evaluator, const LossLedger& ledger, int f_index,
                      const Policy& mu, double eta);

/// q-type returns the greedy policy itself; v-type replaces one timestep
/// (round-robin over episodes by default) with the uniform action draw.
Policy exploration_policy(const Policy& predicted, ExplorationMode mode, int k,
                          const std::function<int(int)>& schedule);

RunLog run_mex_mdp(const EpisodicMDP& env, const HypothesisClass& cls, const MexConfig& cfg);
RunLog run_mex_mg(const ZeroSumMG& env, const HypothesisClass& cls, const MexConfig& cfg);

}  // namespace mex
