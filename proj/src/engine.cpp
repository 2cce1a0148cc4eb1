#include "jamgame/engine.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "jamgame/errors.hpp"
#include "jamgame/expected.hpp"

namespace jamgame {

void MatchConfig::validate() const {
  game.validate();
  if (true_state >= game.num_states()) throw DataError("true state out of range");
  if (!prior.probs.empty()) {
    if (prior.size() != game.num_states()) throw DataError("prior size mismatch");
    validate_distribution(prior.probs, "prior");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) throw DataError("lambda must lie in (0, 1)");
  if (horizon < 1) throw DataError("horizon must be >= 1");
  if (stages < 1) throw DataError("stages must be >= 1");
  if (!(regret_snap >= 0.0)) throw DataError("regret snap tolerance must be >= 0");
  if (enb == EnbStrategyKind::kApproximated && monitoring != Monitoring::kFull)
    throw DataError("the approximated eNodeB strategy requires full monitoring");
}

GameSpec MatchConfig::effective_game() const {
  GameSpec g = game;
  g.discount = lambda;
  g.horizon = horizon;
  if (!prior.probs.empty()) g.prior = prior;
  g.validate();
  return g;
}

double Trajectory::tail_bound() const {
  return std::pow(1.0 - lambda, static_cast<double>(stages.size())) * max_abs_payoff;
}

DiscountedUtility discounted_utility(const Trajectory& trajectory) {
  if (trajectory.stages.empty()) throw DataError("empty trajectory");
  return {trajectory.stages.back().disc_u, trajectory.tail_bound()};
}

ApproximatedEnbPlayer::ApproximatedEnbPlayer(const GameSpec& game, const BeliefState& prior,
                                             int horizon, RegretInit init, double snap_tol)
    : agent_(game, prior, horizon, Rng(0), init, snap_tol) {}

ExpectedEnbPlayer::ExpectedEnbPlayer(const GameSpec& game, const BeliefState& prior)
    : policy_(expected_policy(game, prior)) {}

Trajectory play_match(const MatchConfig& config) {
  config.validate();
  const GameSpec game = config.effective_game();
  if (config.enb == EnbStrategyKind::kApproximated) {
    ApproximatedEnbPlayer enb(game, game.prior, config.horizon, config.regret_init,
                              config.regret_snap);
    return play_match(config, enb);
  }
  ExpectedEnbPlayer enb(game, game.prior);
  return play_match(config, enb);
}

Trajectory play_match(const MatchConfig& config, EnbPlayer& enb) {
  if (config.monitoring != Monitoring::kFull && dynamic_cast<ApproximatedEnbPlayer*>(&enb) != nullptr)
    throw DataError("the approximated eNodeB strategy requires full monitoring");
  MatchConfig checked = config;
  checked.enb = EnbStrategyKind::kExpected;  // the player is supplied
  checked.validate();
  const GameSpec game = config.effective_game();
  const std::size_t theta = config.true_state;

  const Rng root(config.seed);
  InformedAgent jammer(game, theta, game.prior, config.horizon, root.substream("jammer"));
  Rng enb_rng = root.substream("enb");
  MonitoringEnbPlayer* monitor =
      config.monitoring == Monitoring::kFull ? dynamic_cast<MonitoringEnbPlayer*>(&enb) : nullptr;

  Trajectory out;
  out.true_state = theta;
  out.lambda = config.lambda;
  out.max_abs_payoff = game.max_abs_payoff();
  out.stages.reserve(static_cast<std::size_t>(config.stages));

  // Engine-side regret accounting, identical to what the approximated
  // eNodeB carries, so every trajectory reports it.
  int t = 0;
  try {
    RegretVector w = initial_regret(game, game.prior, config.horizon, config.regret_init);
    double weight = config.lambda;
    double disc = 0.0;
    for (t = 1; t <= config.stages; ++t, weight *= 1.0 - config.lambda) {
      StageRecord rec;
      rec.t = t;
      rec.jammer_policy = jammer.policy();
      rec.enb_policy = enb.policy();
      validate_distribution(rec.enb_policy.probs, "eNodeB policy", kSolverProbabilityTol);
      const InformedStepResult js = jammer.step();
      rec.a_j = js.action;
      rec.a_0 = enb_rng.sample(rec.enb_policy.probs);
      if (monitor != nullptr) monitor->observe(rec.a_j);
      w = settle_regret(w, regret_update(w, rec.a_j, rec.enb_policy, game, config.lambda),
                        config.regret_snap);
      rec.belief = js.next_belief;
      rec.regret = w;
      rec.stage_u = game.payoff[theta](rec.a_j, rec.a_0);
      disc += weight * rec.stage_u;
      rec.disc_u = disc;
      out.stages.push_back(std::move(rec));
    }
  } catch (const SolverError& e) {
    throw SolverError("stage " + std::to_string(t) + ": " + e.what());
  }
  return out;
}

std::string format_fixed(double value, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  char buf[512];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, precision);
  std::string s(buf, res.ptr);
  // "-0.000" after rounding reads as zero
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const std::size_t ns = trajectory.stages.empty() ? 0 : trajectory.stages.front().belief.size();
  out << "t,a_j,a_0";
  for (std::size_t s = 1; s <= ns; ++s) out << ",p_" << s;
  for (std::size_t s = 1; s <= ns; ++s) out << ",w_" << s;
  out << ",stage_u,disc_u\n";
  for (const StageRecord& r : trajectory.stages) {
    out << r.t << ',' << r.a_j + 1 << ',' << r.a_0 + 1;
    for (double p : r.belief.probs) out << ',' << format_fixed(p);
    for (double w : r.regret.w) out << ',' << format_fixed(w);
    out << ',' << format_fixed(r.stage_u) << ',' << format_fixed(r.disc_u) << '\n';
  }
}

BeliefState prior_with_mass(const BeliefState& base, std::size_t state, double value) {
  if (state >= base.size()) throw DataError("state out of range");
  if (!(value >= 0.0 && value <= 1.0)) throw DataError("grid value must lie in [0, 1]");
  const std::size_t n = base.size();
  BeliefState out{std::vector<double>(n, 0.0)};
  if (n == 1) {
    if (value != 1.0) throw DataError("single-state prior must put mass 1 on the state");
    out.probs[0] = 1.0;
    return out;
  }
  double rest = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    if (s != state) rest += base[s];
  for (std::size_t s = 0; s < n; ++s) {
    if (s == state) continue;
    const double share = rest > 0.0 ? base[s] / rest : 1.0 / static_cast<double>(n - 1);
    out.probs[s] = (1.0 - value) * share;
  }
  out.probs[state] = value;
  return out;
}

void steady_state(const Trajectory& trajectory, int window, MixedAction& jammer,
                  UninformedPolicy& enb) {
  if (trajectory.stages.empty()) throw DataError("empty trajectory");
  const std::size_t n = trajectory.stages.size();
  const std::size_t k = window < 1 ? n : std::min(n, static_cast<std::size_t>(window));
  const StageRecord& last = trajectory.stages.back();
  jammer.probs.assign(last.jammer_policy.column(trajectory.true_state).size(), 0.0);
  enb.probs.assign(last.enb_policy.size(), 0.0);
  for (std::size_t i = n - k; i < n; ++i) {
    const StageRecord& r = trajectory.stages[i];
    const MixedAction& x = r.jammer_policy.column(trajectory.true_state);
    for (std::size_t a = 0; a < x.size(); ++a) jammer.probs[a] += x[a] / static_cast<double>(k);
    for (std::size_t b = 0; b < r.enb_policy.size(); ++b)
      enb.probs[b] += r.enb_policy[b] / static_cast<double>(k);
  }
}

int convergence_stage(const Trajectory& trajectory, double tol, int hold) {
  const auto& st = trajectory.stages;
  const std::size_t need = static_cast<std::size_t>(std::max(1, hold));
  // Walk back from the end while successive policies stay within tol.
  std::size_t first = st.size();  // 1-based stage where the settled run starts
  while (first > 1) {
    double dist = 0.0;
    for (std::size_t b = 0; b < st[first - 1].enb_policy.size(); ++b)
      dist += std::abs(st[first - 1].enb_policy[b] - st[first - 2].enb_policy[b]);
    if (dist >= tol) break;
    --first;
  }
  if (first == 0 || st.size() - first < need) return -1;
  return static_cast<int>(first);
}

namespace {

SweepRow run_point(const SweepConfig& config, double value) {
  const MatchConfig& base = config.base;
  const BeliefState base_prior = base.prior.probs.empty() ? base.game.prior : base.prior;
  SweepRow row;
  row.prior = prior_with_mass(base_prior, base.true_state, value);
  const int reps = std::max(1, config.replicates);
  bool settled_all = true;
  double settled_sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    MatchConfig mc = base;
    mc.prior = row.prior;
    mc.seed = r == 0 ? base.seed : Rng(base.seed).substream(static_cast<std::uint64_t>(r)).seed();
    const Trajectory traj = play_match(mc);
    MixedAction x;
    UninformedPolicy y;
    steady_state(traj, config.window, x, y);
    if (r == 0) {
      row.jammer_policy.probs.assign(x.size(), 0.0);
      row.enb_policy.probs.assign(y.size(), 0.0);
      row.final_belief.probs.assign(row.prior.size(), 0.0);
    }
    for (std::size_t a = 0; a < x.size(); ++a) row.jammer_policy.probs[a] += x[a] / reps;
    for (std::size_t b = 0; b < y.size(); ++b) row.enb_policy.probs[b] += y[b] / reps;
    const BeliefState& fb = traj.stages.back().belief;
    for (std::size_t s = 0; s < fb.size(); ++s) row.final_belief.probs[s] += fb[s] / reps;
    row.disc_u += discounted_utility(traj).value / reps;
    const int c = convergence_stage(traj, config.convergence_tol, config.window);
    if (c < 0) settled_all = false;
    settled_sum += c;
  }
  row.convergence_stage = settled_all ? settled_sum / reps : -1.0;
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_prior(const SweepConfig& config) {
  config.base.game.validate();
  if (config.grid.empty()) throw DataError("empty prior grid");
  std::vector<SweepRow> rows(config.grid.size());
  std::vector<std::exception_ptr> errors(config.grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        rows[i] = run_point(config, config.grid[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t jobs =
      std::min<std::size_t>(rows.size(), static_cast<std::size_t>(std::max(1, config.jobs)));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_sweep_csv(std::ostream& out, const GameSpec& game, const std::vector<SweepRow>& rows) {
  const std::size_t ns = game.num_states();
  for (std::size_t s = 1; s <= ns; ++s) out << (s == 1 ? "" : ",") << "prior_" << s;
  for (std::size_t a = 1; a <= game.num_jammer_actions(); ++a) out << ",x_" << a;
  for (std::size_t b = 1; b <= game.num_enb_actions(); ++b) out << ",y_" << b;
  for (std::size_t s = 1; s <= ns; ++s) out << ",belief_" << s;
  out << ",disc_u,converged_t\n";
  for (const SweepRow& r : rows) {
    bool first = true;
    for (double p : r.prior.probs) {
      out << (first ? "" : ",") << format_fixed(p);
      first = false;
    }
    for (double v : r.jammer_policy.probs) out << ',' << format_fixed(v);
    for (double v : r.enb_policy.probs) out << ',' << format_fixed(v);
    for (double v : r.final_belief.probs) out << ',' << format_fixed(v);
    out << ',' << format_fixed(r.disc_u) << ',' << format_fixed(r.convergence_stage, 2) << '\n';
  }
}

}  // namespace jamgame
