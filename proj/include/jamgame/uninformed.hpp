#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "jamgame/game_model.hpp"
#include "jamgame/history_tree.hpp"
#include "jamgame/lp.hpp"
#include "jamgame/rng.hpp"

namespace jamgame {

// Anti-discounted regret, one entry per state.
struct RegretVector {
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  double operator[](std::size_t i) const { return w[i]; }
  friend bool operator==(const RegretVector&, const RegretVector&) = default;
};

using UninformedPolicy = MixedAction;

// eNodeB behavior strategy over jammer histories of length 0..stages-1.
struct EnbStrategyTree {
  HistoryIndex index{1, 0};
  std::vector<MixedAction> nodes;  // laid out by index.flat()

  int stages() const { return index.last_stage(); }
  const MixedAction& at(HistoryNode h) const { return nodes.at(index.flat(h)); }
};

// Per-state worst case over pure jammer paths of sum_t lambda (1-lambda)^(t-1)
// U^theta(a_t, :) y(prefix_t), by backward induction.
std::vector<double> path_security_levels(const GameSpec& game, const EnbStrategyTree& tree);

struct SecurityLevel {
  std::vector<double> levels;  // mu^theta, one per state
  EnbStrategyTree tree;
};

// Variable layout shared by the primal and dual LPs: y(h, b) for decision
// nodes h over `stages` stages, then one l per state, then (dual only) L.
class UninformedLpLayout {
 public:
  UninformedLpLayout(const GameSpec& game, int stages);

  const HistoryIndex& tree() const { return tree_; }
  std::size_t num_y() const { return tree_.total_nodes() * num_enb_; }
  std::size_t y_var(HistoryNode h, std::size_t b) const { return tree_.flat(h) * num_enb_ + b; }
  std::size_t l_var(std::size_t k) const { return num_y() + k; }
  // Number of pure jammer paths of full length.
  std::size_t num_paths() const { return tree_.layer_size(tree_.last_stage()) * branching_; }

 private:
  HistoryIndex tree_;
  std::size_t num_enb_;
  std::size_t branching_;
};

// Primal LP: min sum_theta p^theta l^theta over behavior trees y, subject to
// every pure path's discounted payoff in state theta being <= l^theta.
LinearProgram build_security_lp(const GameSpec& game, const BeliefState& p, int stages);

// Solves the primal LP. The returned levels are re-evaluated from the tree
// (so zero-belief states also get their actual worst case).
SecurityLevel approx_security_level(const GameSpec& game, const BeliefState& p, int stages);

// w' = (w + lambda U^theta(observed, :) played) / (1 - lambda), per state.
RegretVector regret_update(const RegretVector& w, std::size_t observed,
                           const UninformedPolicy& played, const GameSpec& game, double lambda);

// w - max(w).
RegretVector shifted_to_max(const RegretVector& w);

// Per state, keeps before[s] when |after[s] - before[s]| <= tol max(1, |before[s]|).
// The update multiplies any offset from its fixed point w = -u by
// 1/(1-lambda) each stage, so rounding error alone would otherwise grow to
// O(1) within a few dozen stages. tol = 0 returns `after` unchanged.
RegretVector settle_regret(const RegretVector& before, const RegretVector& after, double tol);

inline constexpr double kDefaultRegretSnap = 1e-9;

// Bound on |w| after `updates` updates from w1:
// (|w1|_inf + max|U|) / (1 - lambda)^updates.
double regret_growth_bound(double w1_abs, double max_abs_payoff, double lambda, int updates);

struct UninformedSolution {
  double value = 0.0;  // L*
  UninformedPolicy policy;
  EnbStrategyTree tree;
};

// Dual LP: min L s.t. w^theta + l^theta <= L, path rows as in the primal.
// States whose regret is too far below the maximum to ever bind are dropped.
// With an anchor, a second LP picks, among the optimal trees, one whose root
// policy is closest to the anchor in L1.
UninformedSolution solve_uninformed(const GameSpec& game, const RegretVector& w, int stages,
                                    const UninformedPolicy* anchor = nullptr);

UninformedPolicy approx_uninformed_strategy(const GameSpec& game, const RegretVector& w,
                                            int stages);

// How w_1 is derived from the T-stage security levels mu*_T.
//   kLiteral:        w_1 = -mu*_T
//   kMassNormalized: w_1 = -mu*_T / (1 - (1-lambda)^T), the stationary
//                    estimate of the infinite-horizon level.
enum class RegretInit { kMassNormalized, kLiteral };

RegretVector initial_regret(const GameSpec& game, const BeliefState& prior, int horizon,
                            RegretInit init);

struct UninformedStepResult {
  std::size_t action = 0;
  UninformedPolicy policy;
  RegretVector next_regret;
};

// The eNodeB's side of a match: holds (w, rng). w_1 per initial_regret().
// Policies are solved from w shifted by its maximum, which the LP cannot tell
// apart from w but which keeps the differences between states exact after
// (1-lambda)^-t has swamped the absolute values. When the LP has several
// optimal root policies, the one closest to the previous stage's is played.
class UninformedAgent {
 public:
  UninformedAgent(const GameSpec& game, const BeliefState& prior, int horizon, Rng rng,
                  RegretInit init = RegretInit::kMassNormalized,
                  double snap_tol = kDefaultRegretSnap);

  const RegretVector& regret() const { return w_; }
  // Policy for the current regret (solved once per regret value).
  const UninformedPolicy& policy();
  // Sample the next action from policy().
  std::size_t act();
  // Fold in the jammer's observed action using the policy last returned.
  void observe(std::size_t jammer_action);
  // act() then observe(observed).
  UninformedStepResult step(std::size_t observed);

 private:
  const GameSpec& game_;
  int horizon_;
  double snap_tol_;
  Rng rng_;
  RegretVector w_;
  RegretVector relative_;
  std::optional<UninformedPolicy> policy_;
  std::optional<UninformedPolicy> last_;
};

}  // namespace jamgame
