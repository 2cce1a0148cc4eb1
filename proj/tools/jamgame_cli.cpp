// jamgame: solve, play, sweep and generate payoffs from the command line.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jamgame/engine.hpp"
#include "jamgame/errors.hpp"
#include "jamgame/game_model.hpp"
#include "jamgame/informed.hpp"
#include "jamgame/lp.hpp"
#include "jamgame/lte_scenario.hpp"
#include "jamgame/uninformed.hpp"

namespace {

using namespace jamgame;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  ss.imbue(std::locale::classic());
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    is.imbue(std::locale::classic());
    double v;
    if (!(is >> v) || !(is >> std::ws).eof())
      throw UsageError(std::string("bad number '") + item + "' in " + what);
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

// "a,b,c" or "start:step:stop" (inclusive, rounded to the step).
std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_numbers(text, "--grid");
  std::string spec = text;
  for (char& c : spec)
    if (c == ':') c = ',';
  const auto parts = parse_numbers(spec, "--grid");
  if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0])
    throw UsageError("--grid range must be start:step:stop with step > 0");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  for (long i = 0; i <= count; ++i) {
    const double v = parts[0] + static_cast<double>(i) * parts[1];
    out.push_back(std::round(v * 1e9) / 1e9);
  }
  return out;
}

std::size_t parse_state(const GameSpec& game, const std::string& text) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  std::size_t idx;
  if (is >> idx && (is >> std::ws).eof()) {
    if (idx < 1 || idx > game.num_states()) throw DataError("state index out of range");
    return idx - 1;
  }
  return game.state_index(text);
}

GameSpec load_scenario(const std::string& path) {
  return path.empty() ? bundled_game() : load_game_file(path);
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file '" + path + "'");
  write(out);
  if (!out) throw DataError("failed writing '" + path + "'");
}

void write_mix(std::ostream& out, const char* who, const ActionSet& actions,
               const std::vector<double>& mix) {
  out << who << '\n';
  for (std::size_t i = 0; i < mix.size(); ++i)
    out << "  " << i + 1 << ' ' << format_fixed(mix[i], 6) << ' ' << actions.label(i) << '\n';
}

struct CommonOptions {
  std::string scenario;
  std::string state;
  std::string prior;
  double lambda = 0.9;
  int horizon = 4;
  int stages = 30;
  std::optional<std::uint64_t> seed;
  std::string enb = "approx";
  std::string regret_init = "normalized";
  double regret_snap = kDefaultRegretSnap;
  std::string out;
  int jobs = 1;
};

void add_match_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--scenario", o.scenario, "Scenario JSON (default: bundled cheater/saboteur)");
  cmd->add_option("--state", o.state, "True state: label or 1-based index")->required();
  cmd->add_option("--prior", o.prior, "Common prior, comma separated (default: scenario prior)");
  cmd->add_option("--lambda", o.lambda, "Discount factor lambda")->capture_default_str();
  cmd->add_option("--horizon", o.horizon, "Receding horizon T")->capture_default_str();
  cmd->add_option("--stages", o.stages, "Number of stages N")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Random seed (required)")->required();
  cmd->add_option("--enb", o.enb, "eNodeB strategy")
      ->check(CLI::IsMember({"approx", "expected"}))
      ->capture_default_str();
  cmd->add_option("--regret-init", o.regret_init, "Initial regret w_1")
      ->check(CLI::IsMember({"normalized", "literal"}))
      ->capture_default_str();
  cmd->add_option("--regret-snap", o.regret_snap,
                  "Regret moves at or below this relative size are dropped (0: off)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--out", o.out, "Output CSV (default: stdout)");
}

MatchConfig match_config(const CommonOptions& o) {
  MatchConfig mc;
  mc.game = load_scenario(o.scenario);
  mc.true_state = parse_state(mc.game, o.state);
  if (!o.prior.empty()) mc.prior = BeliefState{parse_numbers(o.prior, "--prior")};
  mc.enb = o.enb == "approx" ? EnbStrategyKind::kApproximated : EnbStrategyKind::kExpected;
  mc.lambda = o.lambda;
  mc.horizon = o.horizon;
  mc.stages = o.stages;
  mc.seed = *o.seed;
  mc.regret_init = o.regret_init == "literal" ? RegretInit::kLiteral : RegretInit::kMassNormalized;
  mc.regret_snap = o.regret_snap;
  mc.validate();
  return mc;
}

void cmd_solve(const CommonOptions& o) {
  const GameSpec game = load_scenario(o.scenario);
  if (o.state.empty() == o.prior.empty()) throw UsageError("solve needs exactly one of --state, --prior");
  std::ostringstream text;
  if (!o.state.empty()) {
    const std::size_t s = parse_state(game, o.state);
    const MatrixGameSolution sol = solve_matrix_game(game.payoff[s]);
    text << "state " << game.states[s] << '\n';
    text << "value " << format_fixed(sol.value, 6) << '\n';
    write_mix(text, "jammer", game.jammer_actions, sol.row_mix);
    write_mix(text, "enb", game.enb_actions, sol.col_mix);
  } else {
    const BeliefState p{parse_numbers(o.prior, "--prior")};
    const GameSpec g = game.with_prior(p.probs);
    // The one-stage LP carries the stage weight lambda.
    const InformedSolution inf = solve_informed(g, p, 1);
    const InformedPolicy x = approx_informed_strategy(g, p, 1);
    const SecurityLevel sec = approx_security_level(g, p, 1);
    text << "prior";
    for (double v : p.probs) text << ' ' << format_fixed(v, 6);
    text << '\n' << "value " << format_fixed(inf.value / g.discount, 6) << '\n';
    for (std::size_t s = 0; s < g.num_states(); ++s) {
      const std::string who = "jammer[" + g.states[s] + "]";
      write_mix(text, who.c_str(), g.jammer_actions, x.column(s).probs);
    }
    write_mix(text, "enb", g.enb_actions, sec.tree.nodes.at(0).probs);
  }
  emit(o.out, [&](std::ostream& out) { out << text.str(); });
}

void cmd_play(const CommonOptions& o) {
  const MatchConfig mc = match_config(o);
  const Trajectory traj = play_match(mc);
  emit(o.out, [&](std::ostream& out) { write_trajectory_csv(out, traj); });
}

struct SweepOptions {
  std::string grid = "0.05:0.05:1";
  int window = 10;
  int replicates = 1;
};

void cmd_sweep(const CommonOptions& o, const SweepOptions& so) {
  SweepConfig sc;
  sc.base = match_config(o);
  sc.grid = parse_grid(so.grid);
  sc.window = so.window;
  sc.replicates = so.replicates;
  sc.jobs = o.jobs;
  if (sc.window < 1 || sc.replicates < 1 || sc.jobs < 1)
    throw UsageError("--window, --replicates and --jobs must be >= 1");
  const auto rows = sweep_prior(sc);
  emit(o.out, [&](std::ostream& out) { write_sweep_csv(out, sc.base.game, rows); });
}

struct GenOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  int jobs = 1;
  std::string errors;
};

void cmd_gen_payoffs(const GenOptions& o) {
  lte::CellConfig cell = o.config.empty() ? lte::default_cell_config()
                                          : lte::load_cell_config_file(o.config);
  if (o.seed) cell.seed = *o.seed;
  if (o.drops) cell.drops = *o.drops;
  cell.jobs = o.jobs;
  const lte::PayoffEstimate est = lte::build_payoff_matrices(cell);
  const std::string doc = save_game(est.game);
  emit(o.out, [&](std::ostream& out) { out << doc; });
  if (!o.errors.empty()) {
    emit(o.errors, [&](std::ostream& out) {
      out << "state,a_j,a_0,payoff,standard_error\n";
      for (std::size_t s = 0; s < est.game.num_states(); ++s)
        for (std::size_t a = 0; a < est.game.num_jammer_actions(); ++a)
          for (std::size_t b = 0; b < est.game.num_enb_actions(); ++b)
            out << est.game.states[s] << ',' << a + 1 << ',' << b + 1 << ','
                << format_fixed(est.game.payoff[s](a, b)) << ','
                << format_fixed(est.standard_error[s](a, b)) << '\n';
    });
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Repeated jammer/eNodeB game with one-sided information"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "jamgame 1.0.0");

  CommonOptions solve_o;
  auto* solve = app.add_subcommand("solve", "Single-shot game: complete information or a prior");
  solve->add_option("--scenario", solve_o.scenario, "Scenario JSON (default: bundled)");
  solve->add_option("--state", solve_o.state, "State label or 1-based index");
  solve->add_option("--prior", solve_o.prior, "Prior, comma separated");
  solve->add_option("--out", solve_o.out, "Output file (default: stdout)");

  CommonOptions play_o;
  auto* play = app.add_subcommand("play", "Play one repeated match and write its trajectory CSV");
  add_match_options(play, play_o);

  CommonOptions sweep_o;
  SweepOptions sweep_so;
  auto* sweep = app.add_subcommand("sweep", "Sweep the prior of the true state");
  add_match_options(sweep, sweep_o);
  sweep->add_option("--grid", sweep_so.grid, "Prior values: a,b,c or start:step:stop")
      ->capture_default_str();
  sweep->add_option("--window", sweep_so.window, "Steady-state window (stages)")
      ->capture_default_str();
  sweep->add_option("--replicates", sweep_so.replicates, "Matches per grid point")
      ->capture_default_str();
  sweep->add_option("--jobs", sweep_o.jobs, "Worker threads")->capture_default_str();

  GenOptions gen_o;
  auto* gen = app.add_subcommand("gen-payoffs", "Estimate payoff matrices from the LTE cell model");
  gen->add_option("--config", gen_o.config, "Cell config JSON (default: built-in)");
  gen->add_option("--out", gen_o.out, "Scenario output (default: stdout)");
  gen->add_option("--seed", gen_o.seed, "Override the config seed");
  gen->add_option("--drops", gen_o.drops, "Override the Monte-Carlo drop count");
  gen->add_option("--jobs", gen_o.jobs, "Worker threads")->capture_default_str();
  gen->add_option("--errors", gen_o.errors, "Also write per-entry standard errors (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) cmd_solve(solve_o);
    if (*play) cmd_play(play_o);
    if (*sweep) cmd_sweep(sweep_o, sweep_so);
    if (*gen) cmd_gen_payoffs(gen_o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
