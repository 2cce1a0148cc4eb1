#include "jamgame/uninformed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jamgame/errors.hpp"

namespace jamgame {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int k = 0; k < exp; ++k) out *= base;
  return out;
}

// Adds, for each listed state, one row per pure path:
//   sum_t lambda (1-lambda)^(t-1) U^theta(a_t, :) y(prefix_t) - l_k <= 0.
void add_path_rows(LinearProgram& lp, std::size_t& row, const UninformedLpLayout& layout,
                   const GameSpec& game, int stages, const std::vector<std::size_t>& states) {
  const std::size_t nj = game.num_jammer_actions();
  const std::size_t n0 = game.num_enb_actions();
  const std::size_t paths = layout.num_paths();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Matrix& u = game.payoff[states[k]];
    for (std::size_t path = 0; path < paths; ++path, ++row) {
      double weight = game.discount;
      for (int t = 1; t <= stages; ++t, weight *= 1.0 - game.discount) {
        const HistoryNode prefix{t, path / ipow(nj, stages - t + 1)};
        const std::size_t a = (path / ipow(nj, stages - t)) % nj;
        for (std::size_t b = 0; b < n0; ++b) lp.ineq_lhs(row, layout.y_var(prefix, b)) = weight * u(a, b);
      }
      lp.ineq_lhs(row, layout.l_var(k)) = -1.0;
    }
  }
}

void add_simplex_rows(LinearProgram& lp, const UninformedLpLayout& layout, std::size_t n0) {
  const HistoryIndex& tree = layout.tree();
  std::size_t row = 0;
  for (int t = 1; t <= tree.last_stage(); ++t) {
    for (std::size_t h = 0; h < tree.layer_size(t); ++h, ++row) {
      for (std::size_t b = 0; b < n0; ++b) lp.eq_lhs(row, layout.y_var({t, h}, b)) = 1.0;
      lp.eq_rhs[row] = 1.0;
    }
  }
}

EnbStrategyTree extract_tree(const UninformedLpLayout& layout, const std::vector<double>& point,
                             std::size_t n0) {
  EnbStrategyTree tree{layout.tree(), {}};
  const std::size_t nodes = layout.tree().total_nodes();
  tree.nodes.reserve(nodes);
  for (std::size_t f = 0; f < nodes; ++f) {
    std::vector<double> y(point.begin() + static_cast<std::ptrdiff_t>(f * n0),
                          point.begin() + static_cast<std::ptrdiff_t>((f + 1) * n0));
    tree.nodes.push_back(MixedAction{renormalized(y)});
  }
  return tree;
}

constexpr double kTieTol = 1e-9;

void check_stages(int stages) {
  if (stages < 1) throw DataError("horizon must be >= 1");
}

}  // namespace

UninformedLpLayout::UninformedLpLayout(const GameSpec& game, int stages)
    : tree_(game.num_jammer_actions(), stages - 1),
      num_enb_(game.num_enb_actions()),
      branching_(game.num_jammer_actions()) {}

std::vector<double> path_security_levels(const GameSpec& game, const EnbStrategyTree& tree) {
  const std::size_t nj = game.num_jammer_actions();
  const std::size_t n0 = game.num_enb_actions();
  const int stages = tree.stages();
  std::vector<double> out(game.num_states());
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    const Matrix& u = game.payoff[s];
    std::vector<double> next;  // values of stage t+1 nodes
    for (int t = stages; t >= 1; --t) {
      const double weight = game.discount * std::pow(1.0 - game.discount, t - 1);
      const std::size_t width = tree.index.layer_size(t);
      std::vector<double> cur(width);
      for (std::size_t h = 0; h < width; ++h) {
        const MixedAction& y = tree.at({t, h});
        double best = -kInf;
        for (std::size_t a = 0; a < nj; ++a) {
          double v = 0.0;
          for (std::size_t b = 0; b < n0; ++b) v += u(a, b) * y[b];
          v *= weight;
          if (t < stages) v += next[h * nj + a];
          best = std::max(best, v);
        }
        cur[h] = best;
      }
      next = std::move(cur);
    }
    out[s] = next[0];
  }
  return out;
}

LinearProgram build_security_lp(const GameSpec& game, const BeliefState& p, int stages) {
  game.validate();
  check_stages(stages);
  validate_distribution(p.probs, "belief");
  if (p.size() != game.num_states()) throw DataError("belief size mismatch");

  const UninformedLpLayout layout(game, stages);
  const std::size_t ns = game.num_states();
  const std::size_t n0 = game.num_enb_actions();
  const std::size_t nvars = layout.num_y() + ns;

  LinearProgram lp;
  lp.sense = Sense::kMinimize;
  lp.objective.assign(nvars, 0.0);
  lp.lower.assign(nvars, 0.0);
  lp.upper.assign(nvars, kInf);
  for (std::size_t s = 0; s < ns; ++s) {
    lp.objective[layout.l_var(s)] = p[s];
    lp.lower[layout.l_var(s)] = -kInf;
  }
  lp.ineq_lhs = Matrix(ns * layout.num_paths(), nvars);
  lp.ineq_rhs.assign(lp.ineq_lhs.rows(), 0.0);
  lp.eq_lhs = Matrix(layout.tree().total_nodes(), nvars);
  lp.eq_rhs.assign(lp.eq_lhs.rows(), 0.0);

  std::vector<std::size_t> states(ns);
  for (std::size_t s = 0; s < ns; ++s) states[s] = s;
  std::size_t row = 0;
  add_path_rows(lp, row, layout, game, stages, states);
  add_simplex_rows(lp, layout, n0);
  return lp;
}

SecurityLevel approx_security_level(const GameSpec& game, const BeliefState& p, int stages) {
  const LinearProgram lp = build_security_lp(game, p, stages);
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) throw SolverError("security-level LP did not reach an optimum");
  const UninformedLpLayout layout(game, stages);
  SecurityLevel out;
  out.tree = extract_tree(layout, sol.point, game.num_enb_actions());
  out.levels = path_security_levels(game, out.tree);
  return out;
}

RegretVector regret_update(const RegretVector& w, std::size_t observed,
                           const UninformedPolicy& played, const GameSpec& game, double lambda) {
  if (w.size() != game.num_states()) throw DataError("regret size mismatch");
  if (observed >= game.num_jammer_actions()) throw DataError("observed action out of range");
  if (played.size() != game.num_enb_actions()) throw DataError("policy size mismatch");
  RegretVector out{std::vector<double>(w.size())};
  for (std::size_t s = 0; s < w.size(); ++s) {
    double u = 0.0;
    for (std::size_t b = 0; b < played.size(); ++b) u += game.payoff[s](observed, b) * played[b];
    out.w[s] = (w[s] + lambda * u) / (1.0 - lambda);
  }
  return out;
}

RegretVector shifted_to_max(const RegretVector& w) {
  if (w.w.empty()) return w;
  const double top = *std::max_element(w.w.begin(), w.w.end());
  RegretVector out = w;
  for (double& v : out.w) v -= top;
  return out;
}

RegretVector settle_regret(const RegretVector& before, const RegretVector& after, double tol) {
  if (before.size() != after.size()) throw DataError("regret size mismatch");
  RegretVector out = after;
  for (std::size_t s = 0; s < out.size(); ++s)
    if (std::abs(after[s] - before[s]) <= tol * std::max(1.0, std::abs(before[s])))
      out.w[s] = before[s];
  return out;
}

double regret_growth_bound(double w1_abs, double max_abs_payoff, double lambda, int updates) {
  return (w1_abs + max_abs_payoff) / std::pow(1.0 - lambda, updates);
}

UninformedSolution solve_uninformed(const GameSpec& game, const RegretVector& w, int stages,
                                     const UninformedPolicy* anchor) {
  game.validate();
  check_stages(stages);
  if (w.size() != game.num_states()) throw DataError("regret size mismatch");
  for (double v : w.w)
    if (!std::isfinite(v)) throw DataError("regret has non-finite entries");

  // Every path level lies within +-bound, so a state whose regret trails the
  // leader by more than 2 * bound can never make w + l <= L bind.
  const double bound =
      (1.0 - std::pow(1.0 - game.discount, stages)) * game.max_abs_payoff();
  const double top = *std::max_element(w.w.begin(), w.w.end());
  std::vector<std::size_t> active;
  for (std::size_t s = 0; s < w.size(); ++s)
    if (top - w[s] <= 2.0 * bound * (1.0 + 1e-9) + 1e-12) active.push_back(s);

  const UninformedLpLayout layout(game, stages);
  const std::size_t n0 = game.num_enb_actions();
  const std::size_t na = active.size();
  const std::size_t l_top = layout.l_var(na);  // L
  const std::size_t nvars = l_top + 1;

  LinearProgram lp;
  lp.sense = Sense::kMinimize;
  lp.objective.assign(nvars, 0.0);
  lp.objective[l_top] = 1.0;
  lp.lower.assign(nvars, 0.0);
  lp.upper.assign(nvars, kInf);
  for (std::size_t k = 0; k <= na; ++k) lp.lower[layout.l_var(k)] = -kInf;
  lp.ineq_lhs = Matrix(na * layout.num_paths() + na, nvars);
  lp.ineq_rhs.assign(lp.ineq_lhs.rows(), 0.0);
  lp.eq_lhs = Matrix(layout.tree().total_nodes(), nvars);
  lp.eq_rhs.assign(lp.eq_lhs.rows(), 0.0);

  std::size_t row = 0;
  add_path_rows(lp, row, layout, game, stages, active);
  // (w^theta - top) + l^theta - L <= 0
  for (std::size_t k = 0; k < na; ++k, ++row) {
    lp.ineq_lhs(row, layout.l_var(k)) = 1.0;
    lp.ineq_lhs(row, l_top) = -1.0;
    lp.ineq_rhs[row] = top - w[active[k]];
  }
  add_simplex_rows(lp, layout, n0);

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::kOptimal) throw SolverError("regret LP did not reach an optimum");
  const double value = sol.value;
  if (anchor != nullptr) {
    // Among optimal trees, take one whose root is L1-closest to the anchor:
    // d_b >= |y_root(b) - anchor(b)|, L <= L* + tol, minimize sum d.
    if (anchor->size() != n0) throw DataError("anchor policy size mismatch");
    const std::size_t nv2 = nvars + n0;
    LinearProgram tie;
    tie.sense = Sense::kMinimize;
    tie.objective.assign(nv2, 0.0);
    tie.lower = lp.lower;
    tie.upper = lp.upper;
    tie.lower.resize(nv2, 0.0);
    tie.upper.resize(nv2, kInf);
    tie.ineq_lhs = Matrix(lp.ineq_lhs.rows() + 2 * n0 + 1, nv2);
    tie.ineq_rhs = lp.ineq_rhs;
    tie.ineq_rhs.resize(tie.ineq_lhs.rows(), 0.0);
    for (std::size_t i = 0; i < lp.ineq_lhs.rows(); ++i)
      for (std::size_t j = 0; j < nvars; ++j) tie.ineq_lhs(i, j) = lp.ineq_lhs(i, j);
    std::size_t r2 = lp.ineq_lhs.rows();
    for (std::size_t b = 0; b < n0; ++b) {
      const std::size_t d = nvars + b;
      const std::size_t y = layout.y_var({1, 0}, b);
      tie.objective[d] = 1.0;
      tie.ineq_lhs(r2, y) = 1.0;  // y - d <= a
      tie.ineq_lhs(r2, d) = -1.0;
      tie.ineq_rhs[r2++] = (*anchor)[b];
      tie.ineq_lhs(r2, y) = -1.0;  // -y - d <= -a
      tie.ineq_lhs(r2, d) = -1.0;
      tie.ineq_rhs[r2++] = -(*anchor)[b];
    }
    tie.ineq_lhs(r2, l_top) = 1.0;
    tie.ineq_rhs[r2] = value + kTieTol * (1.0 + std::abs(value));
    tie.eq_lhs = Matrix(lp.eq_lhs.rows(), nv2);
    for (std::size_t i = 0; i < lp.eq_lhs.rows(); ++i)
      for (std::size_t j = 0; j < nvars; ++j) tie.eq_lhs(i, j) = lp.eq_lhs(i, j);
    tie.eq_rhs = lp.eq_rhs;
    sol = solve_lp(tie);
    if (sol.status != LpStatus::kOptimal) throw SolverError("regret tie-break LP did not reach an optimum");
  }
  UninformedSolution out;
  out.value = value + top;
  out.tree = extract_tree(layout, sol.point, n0);
  out.policy = out.tree.at({1, 0});
  return out;
}

UninformedPolicy approx_uninformed_strategy(const GameSpec& game, const RegretVector& w,
                                            int stages) {
  return solve_uninformed(game, w, stages).policy;
}

RegretVector initial_regret(const GameSpec& game, const BeliefState& prior, int horizon,
                            RegretInit init) {
  const SecurityLevel mu = approx_security_level(game, prior, horizon);
  const double mass =
      init == RegretInit::kLiteral ? 1.0 : 1.0 - std::pow(1.0 - game.discount, horizon);
  RegretVector w;
  for (double v : mu.levels) w.w.push_back(-v / mass);
  return w;
}

UninformedAgent::UninformedAgent(const GameSpec& game, const BeliefState& prior, int horizon,
                                 Rng rng, RegretInit init, double snap_tol)
    : game_(game),
      horizon_(horizon),
      snap_tol_(snap_tol),
      rng_(rng),
      w_(initial_regret(game, prior, horizon, init)),
      relative_(shifted_to_max(w_)) {}

const UninformedPolicy& UninformedAgent::policy() {
  if (!policy_)
    policy_ = solve_uninformed(game_, relative_, horizon_, last_ ? &*last_ : nullptr).policy;
  return *policy_;
}

std::size_t UninformedAgent::act() { return rng_.sample(policy().probs); }

void UninformedAgent::observe(std::size_t jammer_action) {
  const UninformedPolicy& played = policy();
  w_ = settle_regret(w_, regret_update(w_, jammer_action, played, game_, game_.discount),
                     snap_tol_);
  relative_ = settle_regret(
      relative_,
      shifted_to_max(regret_update(relative_, jammer_action, played, game_, game_.discount)),
      snap_tol_);
  last_ = std::move(policy_);
  policy_.reset();
}

UninformedStepResult UninformedAgent::step(std::size_t observed) {
  UninformedStepResult out;
  out.policy = policy();
  out.action = act();
  observe(observed);
  out.next_regret = w_;
  return out;
}

}  // namespace jamgame
