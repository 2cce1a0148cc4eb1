#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "jamgame/game_model.hpp"
#include "jamgame/history_tree.hpp"
#include "jamgame/lp.hpp"
#include "jamgame/rng.hpp"

namespace jamgame {

// Belief entries below this are snapped to zero.
inline constexpr double kBeliefFloor = 1e-12;

struct BeliefUpdate {
  BeliefState belief;
  // The observed action had zero probability under the policy; the belief
  // was left unchanged.
  bool off_support = false;
};

// Bayes' rule on the jammer's observed action.
BeliefUpdate belief_update(const BeliefState& p, const StateDependentStrategy& x,
                           std::size_t observed);

// sum_theta p^theta x^theta(a)
double action_marginal(const BeliefState& p, const StateDependentStrategy& x, std::size_t a);

// Variable layout of the realization-plan LP over a `stages`-stage game.
// q(state, h) is the probability that the jammer in `state` plays history h
// (histories of length 0..stages); l(h) is the discounted, reach-weighted
// guaranteed stage payoff at decision node h (lengths 0..stages-1).
class InformedLpLayout {
 public:
  InformedLpLayout(const GameSpec& game, int stages);

  int stages() const { return stages_; }
  const HistoryIndex& tree() const { return tree_; }
  std::size_t num_q_nodes() const { return num_q_nodes_; }
  std::size_t num_decision_nodes() const { return num_decision_nodes_; }
  std::size_t num_vars() const { return num_states_ * num_q_nodes_ + num_decision_nodes_; }
  std::size_t q_var(std::size_t state, HistoryNode h) const {
    return state * num_q_nodes_ + tree_.flat(h);
  }
  std::size_t l_var(HistoryNode h) const { return num_states_ * num_q_nodes_ + tree_.flat(h); }

 private:
  int stages_;
  std::size_t num_states_;
  HistoryIndex tree_;
  std::size_t num_q_nodes_;
  std::size_t num_decision_nodes_;
};

// Realization-plan LP whose optimum is the `stages`-stage lambda-discounted
// value V(p) (stage weights lambda (1-lambda)^(t-1), not renormalized).
// The per-state terms of the security constraints carry the weight p^theta.
// Throws DataError if the dense LP would exceed `memory_budget_bytes`.
LinearProgram build_informed_lp(const GameSpec& game, const BeliefState& p, int stages,
                                std::size_t memory_budget_bytes = std::size_t{1} << 30);

struct InformedSolution {
  double value = 0.0;
  InformedPolicy policy;           // first-stage behavior, one column per state
  std::vector<double> realization;  // q variables, laid out per InformedLpLayout
};

InformedSolution solve_informed(const GameSpec& game, const BeliefState& p, int stages);

// First-stage strategy of the `horizon`-stage game at belief p. Columns for
// zero-belief states fall back to that state's complete-information security
// strategy.
InformedPolicy approx_informed_strategy(const GameSpec& game, const BeliefState& p, int horizon);

struct InformedStepResult {
  std::size_t action = 0;
  InformedPolicy policy;
  BeliefState next_belief;
  bool off_support = false;
};

// The jammer's side of a match: carries (state, belief, rng) and memoizes the
// LP per belief.
class InformedAgent {
 public:
  InformedAgent(const GameSpec& game, std::size_t true_state, BeliefState prior, int horizon,
                Rng rng);

  const BeliefState& belief() const { return belief_; }
  std::size_t true_state() const { return state_; }

  // Policy at the current belief (cached).
  const InformedPolicy& policy();
  // Sample an action from column true_state, announce it, update the belief.
  InformedStepResult step();

 private:
  const GameSpec& game_;
  std::size_t state_;
  BeliefState belief_;
  int horizon_;
  Rng rng_;
  std::map<std::vector<double>, InformedPolicy> cache_;
};

}  // namespace jamgame
