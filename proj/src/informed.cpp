#include "jamgame/informed.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "jamgame/errors.hpp"

namespace jamgame {

double action_marginal(const BeliefState& p, const StateDependentStrategy& x, std::size_t a) {
  double total = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) total += p[s] * x.column(s)[a];
  return total;
}

BeliefUpdate belief_update(const BeliefState& p, const StateDependentStrategy& x,
                           std::size_t observed) {
  validate_distribution(p.probs, "belief");
  if (x.num_states() != p.size()) throw DataError("belief_update: policy/belief size mismatch");
  for (const auto& col : x.per_state) {
    validate_distribution(col.probs, "jammer strategy column", kSolverProbabilityTol);
    if (observed >= col.size()) throw DataError("belief_update: action out of range");
  }

  // Non-revealing on the support: the posterior is the prior, exactly.
  bool revealing = false;
  double common = -1.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] <= 0.0) continue;
    const double v = x.column(s)[observed];
    if (common < 0.0) {
      common = v;
    } else if (v != common) {
      revealing = true;
      break;
    }
  }

  const double marginal = action_marginal(p, x, observed);
  if (marginal <= 0.0) return {p, true};
  if (!revealing) return {p, false};

  BeliefState next{std::vector<double>(p.size(), 0.0)};
  double total = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    double v = p[s] * x.column(s)[observed] / marginal;
    if (v < kBeliefFloor) v = 0.0;
    next.probs[s] = v;
    total += v;
  }
  if (total != 1.0)
    for (double& v : next.probs) v /= total;
  return {std::move(next), false};
}

InformedLpLayout::InformedLpLayout(const GameSpec& game, int stages)
    : stages_(stages),
      num_states_(game.num_states()),
      tree_(game.num_jammer_actions(), stages < 1 ? 0 : stages),
      num_q_nodes_(0),
      num_decision_nodes_(0) {
  if (stages < 1) throw DataError("horizon must be >= 1");
  num_q_nodes_ = tree_.total_nodes();
  num_decision_nodes_ = tree_.count_through(stages);
}

LinearProgram build_informed_lp(const GameSpec& game, const BeliefState& p, int stages,
                                std::size_t memory_budget_bytes) {
  game.validate();
  validate_distribution(p.probs, "belief");
  if (p.size() != game.num_states()) throw DataError("belief size mismatch");
  if (stages < 1) throw DataError("horizon must be >= 1");

  // Size check before allocating anything large.
  {
    const double nj = static_cast<double>(game.num_jammer_actions());
    double decision = 0.0, layer = 1.0;
    for (int t = 0; t < stages; ++t, layer *= nj) decision += layer;
    const double q_nodes = decision + layer;
    const double vars = static_cast<double>(game.num_states()) * q_nodes + decision;
    const double rows = decision * static_cast<double>(game.num_enb_actions() + game.num_states()) +
                        static_cast<double>(game.num_states());
    if (vars * rows * sizeof(double) > static_cast<double>(memory_budget_bytes))
      throw DataError("horizon " + std::to_string(stages) + " too large for the memory budget");
  }

  const InformedLpLayout layout(game, stages);
  const HistoryIndex& tree = layout.tree();
  const std::size_t ns = game.num_states();
  const std::size_t nj = game.num_jammer_actions();
  const std::size_t n0 = game.num_enb_actions();
  const std::size_t nvars = layout.num_vars();
  const std::size_t ndec = layout.num_decision_nodes();

  LinearProgram lp;
  lp.sense = Sense::kMaximize;
  lp.objective.assign(nvars, 0.0);
  lp.lower.assign(nvars, 0.0);
  lp.upper.assign(nvars, kInf);
  lp.ineq_lhs = Matrix(ndec * n0, nvars);
  lp.ineq_rhs.assign(ndec * n0, 0.0);
  lp.eq_lhs = Matrix(ns + ndec * ns, nvars);
  lp.eq_rhs.assign(ns + ndec * ns, 0.0);

  const double lambda = game.discount;
  double weight = lambda;
  std::size_t ineq_row = 0;
  std::size_t eq_row = 0;
  for (std::size_t s = 0; s < ns; ++s) {
    lp.eq_lhs(eq_row, layout.q_var(s, {1, 0})) = 1.0;
    lp.eq_rhs[eq_row++] = 1.0;
  }
  for (int t = 1; t <= stages; ++t, weight *= (1.0 - lambda)) {
    for (std::size_t h = 0; h < tree.layer_size(t); ++h) {
      const HistoryNode node{t, h};
      const std::size_t lv = layout.l_var(node);
      lp.objective[lv] = weight;
      lp.lower[lv] = -kInf;
      // l_h <= sum_theta p^theta sum_a q(theta,(h,a)) U^theta(a, b) for every b
      for (std::size_t b = 0; b < n0; ++b, ++ineq_row) {
        lp.ineq_lhs(ineq_row, lv) = 1.0;
        for (std::size_t s = 0; s < ns; ++s) {
          if (p[s] == 0.0) continue;
          for (std::size_t a = 0; a < nj; ++a)
            lp.ineq_lhs(ineq_row, layout.q_var(s, tree.child(node, a))) =
                -p[s] * game.payoff[s](a, b);
        }
      }
      // sum_a q(theta,(h,a)) = q(theta,h)
      for (std::size_t s = 0; s < ns; ++s, ++eq_row) {
        lp.eq_lhs(eq_row, layout.q_var(s, node)) = -1.0;
        for (std::size_t a = 0; a < nj; ++a)
          lp.eq_lhs(eq_row, layout.q_var(s, tree.child(node, a))) = 1.0;
      }
    }
  }
  return lp;
}

InformedSolution solve_informed(const GameSpec& game, const BeliefState& p, int stages) {
  const LinearProgram lp = build_informed_lp(game, p, stages);
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal)
    throw SolverError("informed LP did not reach an optimum");

  const InformedLpLayout layout(game, stages);
  InformedSolution out;
  out.value = sol.value;
  out.realization.assign(sol.point.begin(),
                         sol.point.begin() + game.num_states() * layout.num_q_nodes());
  out.policy.per_state.resize(game.num_states());
  std::vector<double> column(game.num_jammer_actions());
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    for (std::size_t a = 0; a < game.num_jammer_actions(); ++a)
      column[a] = sol.point[layout.q_var(s, layout.tree().child({1, 0}, a))];
    out.policy.per_state[s] = MixedAction{renormalized(column)};
  }
  return out;
}

InformedPolicy approx_informed_strategy(const GameSpec& game, const BeliefState& p, int horizon) {
  InformedPolicy policy = solve_informed(game, p, horizon).policy;
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    if (p[s] > 0.0) continue;
    policy.per_state[s] = MixedAction{solve_matrix_game(game.payoff[s]).row_mix};
  }
  return policy;
}

InformedAgent::InformedAgent(const GameSpec& game, std::size_t true_state, BeliefState prior,
                             int horizon, Rng rng)
    : game_(game), state_(true_state), belief_(std::move(prior)), horizon_(horizon), rng_(rng) {
  if (true_state >= game.num_states()) throw DataError("true state out of range");
  validate_distribution(belief_.probs, "prior");
}

const InformedPolicy& InformedAgent::policy() {
  auto it = cache_.find(belief_.probs);
  if (it == cache_.end())
    it = cache_.emplace(belief_.probs, approx_informed_strategy(game_, belief_, horizon_)).first;
  return it->second;
}

InformedStepResult InformedAgent::step() {
  InformedStepResult out;
  out.policy = policy();
  out.action = rng_.sample(out.policy.column(state_).probs);
  BeliefUpdate upd = belief_update(belief_, out.policy, out.action);
  if (upd.off_support)
    std::cerr << "warning: observed jammer action " << out.action
              << " is off the policy support; belief unchanged\n";
  out.off_support = upd.off_support;
  belief_ = std::move(upd.belief);
  out.next_belief = belief_;
  return out;
}

}  // namespace jamgame
