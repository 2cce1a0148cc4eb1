// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "jamgame/engine.hpp"
#include "jamgame/expected.hpp"
#include "jamgame/game_model.hpp"
#include "jamgame/informed.hpp"
#include "jamgame/lp.hpp"
#include "jamgame/lte_scenario.hpp"
#include "jamgame/uninformed.hpp"
#include "oracles.hpp"

namespace jamgame {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void run(int id, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) {
    o.pass = false;
    o.detail += "; runtime limit " + fmt("%.0f", limit_s) + " s exceeded";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d: %s (%.2f s) %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
  std::fflush(stdout);
}

std::vector<double> simplex(std::mt19937_64& rng, std::size_t n, bool zeros) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution z(0.2);
  std::vector<double> v(n);
  double t = 0.0;
  for (double& x : v) t += (x = zeros && z(rng) ? 0.0 : e(rng));
  if (t == 0.0) v[0] = t = 1.0;
  for (double& x : v) x /= t;
  return v;
}

GameSpec random_game(std::mt19937_64& rng, std::size_t ns, std::size_t nj, std::size_t n0) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  GameSpec g;
  std::vector<std::string> a, b;
  for (std::size_t s = 0; s < ns; ++s) g.states.push_back("s" + std::to_string(s));
  for (std::size_t i = 0; i < nj; ++i) a.push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < n0; ++i) b.push_back("b" + std::to_string(i));
  g.jammer_actions = ActionSet(a);
  g.enb_actions = ActionSet(b);
  for (std::size_t s = 0; s < ns; ++s) {
    Matrix m(nj, n0);
    for (std::size_t i = 0; i < nj; ++i)
      for (std::size_t j = 0; j < n0; ++j) m(i, j) = u(rng);
    g.payoff.push_back(m);
  }
  g.prior = BeliefState{simplex(rng, ns, false)};
  g.discount = 0.9;
  g.validate();
  return g;
}

std::vector<double> prior_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 20; ++k) g.push_back(k * 0.05);
  return g;
}

std::vector<SweepRow> grid_sweep(std::size_t state) {
  SweepConfig s;
  s.base.game = bundled_game();
  s.base.true_state = state;
  s.base.seed = 1;
  s.grid = prior_grid();
  s.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return sweep_prior(s);
}

std::string mix(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt("%.3f", v[i]);
  return s + "]";
}

Outcome c1() {
  const MatrixGameSolution s = solve_matrix_game(bundled_game().payoff[0]);
  const bool ok = std::abs(s.value + 2.0553) <= 1e-4 && s.row_mix[2] > 1 - 1e-9 &&
                  s.col_mix[2] > 1 - 1e-9;
  return {ok, "value " + fmt("%.6f", s.value) + ", x " + mix(s.row_mix) + ", y " + mix(s.col_mix)};
}

Outcome c2() {
  const GameSpec g = bundled_game();
  const Matrix& a = g.payoff[1];
  const MatrixGameSolution s = solve_matrix_game(a);
  const double oracle = oracle::maximin_by_vertices(a);
  const std::vector<double> x = {0, .51, 0, 0, .49}, y = {.59, 0, 0, 0, .41};
  bool ok = std::abs(s.value + 0.9887) <= 1e-4 && std::abs(s.value - oracle) <= 1e-9;
  for (std::size_t i = 0; i < 5; ++i)
    ok = ok && std::abs(s.row_mix[i] - x[i]) <= 0.01 && std::abs(s.col_mix[i] - y[i]) <= 0.01;
  return {ok, "value " + fmt("%.6f", s.value) + " (vertex oracle " + fmt("%.6f", oracle) + "), x " +
                  mix(s.row_mix) + ", y " + mix(s.col_mix)};
}

Outcome c3() {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 1 + t % 6, n = 1 + (t / 6) % 6;
    Matrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
    const double v = solve_matrix_game(a).value;
    const double lo = oracle::maximin_by_vertices(a), hi = oracle::minimax_by_vertices(a);
    worst = std::max({worst, std::abs(v - lo), std::abs(hi - lo)});
  }
  return {worst <= 1e-5, "max deviation " + fmt("%.2e", worst) + " over 100 games"};
}

Outcome c4() {
  std::mt19937_64 rng(4);
  double dev_single = 0.0, dev_one = 0.0;
  for (int t = 0; t < 6; ++t) {
    const GameSpec g = random_game(rng, 1, 2 + t % 2, 2 + t % 3);
    const double v = oracle::maximin_by_vertices(g.payoff[0]);
    for (int h = 1; h <= 3; ++h) {
      const double mass = 1.0 - std::pow(1.0 - g.discount, h);
      dev_single = std::max(dev_single, std::abs(solve_informed(g, g.prior, h).value - mass * v));
    }
  }
  for (int t = 0; t < 10; ++t) {
    const GameSpec g = random_game(rng, 2, 3, 3);
    const double one = solve_matrix_game(oracle::one_shot_normal_form(g, g.prior)).value;
    dev_one = std::max(dev_one, std::abs(solve_informed(g, g.prior, 1).value - g.discount * one));
  }
  const GameSpec b = bundled_game();
  for (double p1 : {0.05, 0.3, 0.5, 0.9}) {
    const BeliefState p{{p1, 1 - p1}};
    const double one = solve_matrix_game(oracle::one_shot_normal_form(b, p)).value;
    dev_one = std::max(dev_one, std::abs(solve_informed(b, p, 1).value - b.discount * one));
  }
  return {dev_single <= 1e-5 && dev_one <= 1e-6,
          "|states|=1: " + fmt("%.2e", dev_single) + ", T=1: " + fmt("%.2e", dev_one)};
}

Outcome c5() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  bool exact = true;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t ns = 2 + t % 3, nj = 2 + t % 4;
    const BeliefState p{simplex(rng, ns, true)};
    StateDependentStrategy x;
    for (std::size_t s = 0; s < ns; ++s) x.per_state.push_back(MixedAction{simplex(rng, nj, true)});
    std::vector<double> mean(ns, 0.0);
    for (std::size_t a = 0; a < nj; ++a) {
      const double pa = action_marginal(p, x, a);
      if (pa <= 0.0) continue;
      const BeliefUpdate up = belief_update(p, x, a);
      for (std::size_t s = 0; s < ns; ++s) mean[s] += pa * up.belief[s];
    }
    for (std::size_t s = 0; s < ns; ++s) worst = std::max(worst, std::abs(mean[s] - p[s]));
    const MixedAction col{simplex(rng, nj, false)};
    StateDependentStrategy flat;
    for (std::size_t s = 0; s < ns; ++s) flat.per_state.push_back(col);
    exact = exact && belief_update(p, flat, t % nj).belief == p;
  }
  return {worst <= 1e-12 && exact, "martingale max deviation " + fmt("%.2e", worst) +
                                       (exact ? ", non-revealing bit-exact" : ", non-revealing NOT exact")};
}

Outcome c6() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GameSpec g = bundled_game();
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double lambda = 0.05 + 0.9 * (u(rng) + 1) / 2;
    RegretVector w{{u(rng), u(rng)}};
    const RegretVector w1 = w;
    std::size_t acts[3];
    std::vector<double> ys[3];
    for (int k = 0; k < 3; ++k) {
      acts[k] = static_cast<std::size_t>((u(rng) + 1) * 2.5) % 5;
      ys[k] = simplex(rng, 5, true);
      w = regret_update(w, acts[k], MixedAction{ys[k]}, g, lambda);
    }
    for (std::size_t s = 0; s < 2; ++s) {
      double expect = w1[s] / std::pow(1 - lambda, 3);
      for (int k = 1; k <= 3; ++k) {
        double stage = 0.0;
        for (std::size_t b = 0; b < 5; ++b) stage += g.payoff[s](acts[k - 1], b) * ys[k - 1][b];
        expect += lambda * stage / std::pow(1 - lambda, 4 - k);
      }
      worst = std::max(worst, std::abs(w[s] - expect) / std::max(1.0, std::abs(expect)));
    }
  }
  return {worst <= 1e-12, "max relative deviation " + fmt("%.2e", worst) + " over 1000 inputs"};
}

// Criteria 7-9 read the steady state (mean of the last 10 of 30 stages).
std::vector<SweepRow> cheater_rows, saboteur_rows;

Outcome c7() {
  cheater_rows = grid_sweep(0);
  const auto grid = prior_grid();
  bool ok = true;
  double min_a3 = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] >= 0.25 - 1e-9) min_a3 = std::min(min_a3, cheater_rows[i].jammer_policy[2]);
  ok = min_a3 >= 0.99;
  MatchConfig mc;
  mc.game = bundled_game();
  mc.true_state = 0;
  mc.seed = 1;
  mc.stages = 2;
  mc.prior = BeliefState{{0.05, 0.95}};
  const double post = play_match(mc).stages[0].belief[0];
  ok = ok && std::abs(post - 0.25) <= 0.02;
  return {ok, "min a_j^3 mass for p1>=0.25: " + fmt("%.4f", min_a3) +
                  "; stage-1 posterior at p1=0.05: [" + fmt("%.4f", post) + " " +
                  fmt("%.4f", 1 - post) + "]"};
}

Outcome c8() {
  saboteur_rows = grid_sweep(1);
  const auto grid = prior_grid();
  double min_a3 = 1.0, worst_diff = 0.0, min_support = 1.0;
  double reveal_at = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& x = saboteur_rows[i].jammer_policy;
    if (grid[i] <= 0.70 + 1e-9) min_a3 = std::min(min_a3, x[2]);
    if (grid[i] >= 0.90 - 1e-9) {
      worst_diff = std::max(worst_diff, std::abs(x[1] - x[4]));
      min_support = std::min(min_support, x[1] + x[4]);
    }
    if (reveal_at < 0 && x[2] < 0.5) reveal_at = grid[i];
  }
  const GameSpec g = bundled_game();
  const MixedAction s90 = approx_informed_strategy(g, BeliefState{{0.1, 0.9}}, 4).column(1);
  const bool ok = min_a3 >= 0.95 && worst_diff <= 0.15 && min_support >= 0.95;
  return {ok, "min a_j^3 mass for p2<=0.70: " + fmt("%.4f", min_a3) +
                  "; p2>=0.90: a_j^2+a_j^5 >= " + fmt("%.4f", min_support) +
                  ", |a_j^2-a_j^5| <= " + fmt("%.4f", worst_diff) + "; reveals from p2=" +
                  fmt("%.2f", reveal_at) + "; stage-1 column at p2=0.90 (info): " + mix(s90.probs)};
}

Outcome c9() {
  if (cheater_rows.empty()) cheater_rows = grid_sweep(0);
  if (saboteur_rows.empty()) saboteur_rows = grid_sweep(1);
  const auto grid = prior_grid();
  double first_throttle = -1.0;
  bool kept = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool has = cheater_rows[i].enb_policy[2] > 0.01;
    if (has && first_throttle < 0) first_throttle = grid[i];
    if (!has && first_throttle >= 0) kept = false;
  }
  double worst_conv = 0.0;
  bool all_settle = true;
  for (const auto* rows : {&cheater_rows, &saboteur_rows})
    for (const SweepRow& r : *rows) {
      if (r.convergence_stage < 0) all_settle = false;
      worst_conv = std::max(worst_conv, r.convergence_stage);
    }
  const bool ok = first_throttle >= 0.30 - 1e-9 && first_throttle <= 0.40 + 1e-9 && kept &&
                  all_settle && worst_conv <= 15;
  return {ok, "Throttling enters the eNodeB support at p1=" + fmt("%.2f", first_throttle) +
                  (kept ? " and stays" : " but drops out later") +
                  "; slowest convergence stage " + fmt("%.0f", worst_conv) +
                  (all_settle ? "" : " (some run never settles)")};
}

Outcome c10() {
  const GameSpec g = bundled_game();
  const ExpectedStrategy e(g);
  double worst = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double p = k / 10.0;
    const UninformedPolicy y = e.policy(BeliefState{{p, 1 - p}});
    for (std::size_t b = 0; b < 5; ++b) {
      const double direct = p * solve_matrix_game(g.payoff[0]).col_mix[b] +
                            (1 - p) * solve_matrix_game(g.payoff[1]).col_mix[b];
      worst = std::max(worst, std::abs(y[b] - direct));
    }
  }
  return {worst <= 1e-9, "max deviation " + fmt("%.2e", worst) + " over 11 priors"};
}

Outcome c11() {
  int compared = 0;
  bool same = true;
  for (std::size_t st : {0u, 1u})
    for (auto enb : {EnbStrategyKind::kApproximated, EnbStrategyKind::kExpected})
      for (std::uint64_t seed : {1u, 42u}) {
        MatchConfig mc;
        mc.game = bundled_game();
        mc.true_state = st;
        mc.enb = enb;
        mc.seed = seed;
        mc.prior = BeliefState{{0.3, 0.7}};
        std::ostringstream a, b;
        write_trajectory_csv(a, play_match(mc));
        write_trajectory_csv(b, play_match(mc));
        same = same && a.str() == b.str();
        ++compared;
      }
  return {same, std::to_string(compared) + " replayed matches " +
                    (same ? "byte-identical" : "DIFFER")};
}

Outcome c12() {
  using namespace lte;
  CellConfig c = default_cell_config();
  std::string d;
  bool ok = true;
  // Direct SINR vs the C/J form.
  Rng rng(12);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double h = 3 * rng.uniform(), g = 3 * rng.uniform() + 1e-3;
    const double r0 = 10 + 490 * rng.uniform(), rj = 10 + 990 * rng.uniform();
    const double p0 = 0.01 + rng.uniform(), pj = 0.01 + rng.uniform();
    const double a = sinr(c, h, g, r0, rj, p0, pj), b = sinr_cj(c, h, g, r0, rj, p0, pj);
    worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
  }
  ok = ok && worst <= 1e-12;
  d += "Eq2/Eq3 rel " + fmt("%.1e", worst);
  // Baseline normalization.
  c.drops = 500;
  bool base = true;
  for (std::size_t s = 0; s < 2; ++s) {
    const KpiRecord k = simulate_pair(c, s, 0, 0);
    base = base && k.cheater_rate.mean == 1.0 && k.connected.mean == 1.0 && k.enb_rate.mean == 1.0;
  }
  ok = ok && base;
  d += base ? "; baseline == 1" : "; baseline != 1";
  // Poisson mean.
  const int n = 10000;
  double total = 0.0;
  const Rng root(13);
  for (int i = 0; i < n; ++i) {
    Rng r = root.substream(static_cast<std::uint64_t>(i));
    total += static_cast<double>(drop_users(c, r).num_users);
  }
  const double mu = c.mean_users(), z = (total / n - mu) / std::sqrt(mu / n);
  ok = ok && std::abs(z) <= 3.0;
  d += "; Poisson z " + fmt("%.2f", z);
  // PFS degenerate cases.
  bool pfs = true;
  PfsResult r = pfs_allocate(std::vector<double>(6, 0.0), 2, std::vector<double>{1.0, 2.0}, 100.0);
  for (std::size_t w : r.winners) pfs = pfs && w == kNoWinner;
  pfs = pfs && r.averages[0] == 0.99 && r.averages[1] == 2.0 * 0.99;
  r = pfs_allocate(std::vector<double>{5.0, 1.0}, 2, std::vector<double>{1.0, 0.0}, 100.0);
  pfs = pfs && r.winners[0] == 1;
  r = pfs_allocate(std::vector<double>{2.0, 2.0}, 2, std::vector<double>{1.0, 1.0}, 10.0);
  pfs = pfs && r.winners[0] == 0;
  ok = ok && pfs;
  d += pfs ? "; PFS cases exact" : "; PFS cases WRONG";
  // Jamming degrades the throughput KPI at C/J = 0 dB.
  c.drops = 10000;
  c.carrier_to_jammer_db = 0.0;
  c.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double worst_kpi = 0.0;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = 1; a < 5; ++a) {
      const Estimate e = simulate_pair(c, s, a, 0).enb_rate;
      worst_kpi = std::max(worst_kpi, e.mean + 3 * e.se);
    }
  ok = ok && worst_kpi < 1.0;
  d += "; jammed throughput KPI mean+3se <= " + fmt("%.4f", worst_kpi);
  return {ok, d};
}

}  // namespace
}  // namespace jamgame

int main() {
  using namespace jamgame;
  run(1, 1, c1);
  run(2, 1, c2);
  run(3, 30, c3);
  run(4, 10, c4);
  run(5, 0, c5);
  run(6, 0, c6);
  run(7, 300, c7);
  run(8, 300, c8);
  run(9, 0, c9);
  run(10, 0, c10);
  run(11, 0, c11);
  run(12, 0, c12);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
