#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "jamgame/engine.hpp"
#include "jamgame/errors.hpp"
#include "jamgame/expected.hpp"
#include "jamgame/game_model.hpp"
#include "jamgame/informed.hpp"
#include "jamgame/lp.hpp"
#include "jamgame/lte_scenario.hpp"
#include "jamgame/uninformed.hpp"

namespace py = pybind11;
using namespace jamgame;

namespace {

using Rows = std::vector<std::vector<double>>;

Matrix to_matrix(const Rows& rows) {
  if (rows.empty() || rows[0].empty()) throw DataError("matrix must be non-empty");
  Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw DataError("ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Rows from_matrix(const Matrix& m) {
  Rows out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

std::vector<std::vector<double>> columns(const StateDependentStrategy& x) {
  std::vector<std::vector<double>> out;
  for (const MixedAction& c : x.per_state) out.push_back(c.probs);
  return out;
}

BeliefState belief_or_default(const GameSpec& g, const std::optional<std::vector<double>>& p) {
  return p ? BeliefState{*p} : g.prior;
}

MatchConfig make_match(const GameSpec& game, std::size_t state,
                       const std::optional<std::vector<double>>& prior, const std::string& enb,
                       double lambda, int horizon, int stages, std::uint64_t seed) {
  MatchConfig mc;
  mc.game = game;
  mc.true_state = state;
  if (prior) mc.prior = BeliefState{*prior};
  if (enb == "approx") {
    mc.enb = EnbStrategyKind::kApproximated;
  } else if (enb == "expected") {
    mc.enb = EnbStrategyKind::kExpected;
  } else {
    throw DataError("enb must be 'approx' or 'expected'");
  }
  mc.lambda = lambda;
  mc.horizon = horizon;
  mc.stages = stages;
  mc.seed = seed;
  return mc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Repeated jammer/eNodeB game with one-sided information";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<GameSpec>(m, "Game")
      .def_property_readonly("states", [](const GameSpec& g) { return g.states; })
      .def_property_readonly("jammer_actions", [](const GameSpec& g) { return g.jammer_actions.labels(); })
      .def_property_readonly("enb_actions", [](const GameSpec& g) { return g.enb_actions.labels(); })
      .def_property_readonly("payoff", [](const GameSpec& g) {
        std::vector<Rows> out;
        for (const Matrix& u : g.payoff) out.push_back(from_matrix(u));
        return out;
      })
      .def_property_readonly("prior", [](const GameSpec& g) { return g.prior.probs; })
      .def_readonly("discount", &GameSpec::discount)
      .def_readonly("horizon", &GameSpec::horizon)
      .def("state_index", &GameSpec::state_index)
      .def("to_json", [](const GameSpec& g) { return save_game(g); });

  m.def("bundled_game", &bundled_game, "The bundled cheater/saboteur scenario");
  m.def("load_game", [](const std::string& doc) { return load_game(doc); }, py::arg("document"));
  m.def("load_game_file", &load_game_file, py::arg("path"));

  m.def(
      "solve_matrix_game",
      [](const Rows& a) {
        const MatrixGameSolution s = solve_matrix_game(to_matrix(a));
        py::dict d;
        d["value"] = s.value;
        d["row_mix"] = s.row_mix;
        d["col_mix"] = s.col_mix;
        return d;
      },
      py::arg("payoff"), "Value and security mixes of a zero-sum matrix game (row maximizes)");

  m.def(
      "solve_informed",
      [](const GameSpec& g, const std::optional<std::vector<double>>& prior, int horizon) {
        const InformedSolution s = solve_informed(g, belief_or_default(g, prior), horizon);
        py::dict d;
        d["value"] = s.value;
        d["policy"] = columns(s.policy);
        return d;
      },
      py::arg("game"), py::arg("prior") = py::none(), py::arg("horizon") = 4,
      "Informed (jammer) LP: value and first-stage policy, one column per state");

  m.def(
      "approx_security_level",
      [](const GameSpec& g, const std::optional<std::vector<double>>& prior, int horizon) {
        const SecurityLevel s = approx_security_level(g, belief_or_default(g, prior), horizon);
        py::dict d;
        d["levels"] = s.levels;
        d["root_policy"] = s.tree.at(HistoryNode{1, 0}).probs;
        return d;
      },
      py::arg("game"), py::arg("prior") = py::none(), py::arg("horizon") = 4);

  m.def(
      "solve_uninformed",
      [](const GameSpec& g, const std::vector<double>& regret, int horizon) {
        const UninformedSolution s = solve_uninformed(g, RegretVector{regret}, horizon);
        py::dict d;
        d["value"] = s.value;
        d["policy"] = s.policy.probs;
        return d;
      },
      py::arg("game"), py::arg("regret"), py::arg("horizon") = 4,
      "Uninformed (eNodeB) dual LP for a regret vector");

  m.def(
      "regret_update",
      [](const GameSpec& g, const std::vector<double>& w, std::size_t observed,
         const std::vector<double>& played, double lambda) {
        return regret_update(RegretVector{w}, observed, MixedAction{played}, g, lambda).w;
      },
      py::arg("game"), py::arg("regret"), py::arg("observed"), py::arg("played"),
      py::arg("lambda_"));

  m.def(
      "belief_update",
      [](const std::vector<double>& p, const std::vector<std::vector<double>>& x, std::size_t a) {
        StateDependentStrategy s;
        for (const auto& c : x) s.per_state.push_back(MixedAction{c});
        const BeliefUpdate u = belief_update(BeliefState{p}, s, a);
        return py::make_tuple(u.belief.probs, u.off_support);
      },
      py::arg("prior"), py::arg("policy"), py::arg("action"),
      "Posterior after `action`; returns (belief, off_support)");

  m.def(
      "expected_policy",
      [](const GameSpec& g, const std::optional<std::vector<double>>& prior) {
        return expected_policy(g, belief_or_default(g, prior)).probs;
      },
      py::arg("game"), py::arg("prior") = py::none());

  m.def(
      "play_match",
      [](const GameSpec& g, std::size_t state, std::uint64_t seed,
         const std::optional<std::vector<double>>& prior, const std::string& enb, double lambda,
         int horizon, int stages) {
        const MatchConfig mc = make_match(g, state, prior, enb, lambda, horizon, stages, seed);
        Trajectory t;
        {
          py::gil_scoped_release release;
          t = play_match(mc);
        }
        py::list records;
        for (const StageRecord& r : t.stages) {
          py::dict d;
          d["t"] = r.t;
          d["a_j"] = r.a_j;
          d["a_0"] = r.a_0;
          d["jammer_policy"] = columns(r.jammer_policy);
          d["enb_policy"] = r.enb_policy.probs;
          d["belief"] = r.belief.probs;
          d["regret"] = r.regret.w;
          d["stage_u"] = r.stage_u;
          d["disc_u"] = r.disc_u;
          records.append(d);
        }
        std::ostringstream csv;
        write_trajectory_csv(csv, t);
        py::dict out;
        out["stages"] = records;
        out["csv"] = csv.str();
        out["tail_bound"] = t.tail_bound();
        return out;
      },
      py::arg("game"), py::arg("state"), py::arg("seed"), py::arg("prior") = py::none(),
      py::arg("enb") = "approx", py::arg("lambda_") = 0.9, py::arg("horizon") = 4,
      py::arg("stages") = 30, "Play one match; actions and states are 0-based");

  m.def(
      "sweep_prior",
      [](const GameSpec& g, std::size_t state, std::uint64_t seed, const std::vector<double>& grid,
         const std::string& enb, double lambda, int horizon, int stages, int window, int replicates,
         int jobs) {
        SweepConfig s;
        s.base = make_match(g, state, std::nullopt, enb, lambda, horizon, stages, seed);
        s.grid = grid;
        s.window = window;
        s.replicates = replicates;
        s.jobs = jobs;
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = sweep_prior(s);
        }
        py::list out;
        for (const SweepRow& r : rows) {
          py::dict d;
          d["prior"] = r.prior.probs;
          d["jammer_policy"] = r.jammer_policy.probs;
          d["enb_policy"] = r.enb_policy.probs;
          d["final_belief"] = r.final_belief.probs;
          d["disc_u"] = r.disc_u;
          d["convergence_stage"] = r.convergence_stage;
          out.append(d);
        }
        return out;
      },
      py::arg("game"), py::arg("state"), py::arg("seed"), py::arg("grid"),
      py::arg("enb") = "approx", py::arg("lambda_") = 0.9, py::arg("horizon") = 4,
      py::arg("stages") = 30, py::arg("window") = 10, py::arg("replicates") = 1,
      py::arg("jobs") = 1);

  m.def(
      "gen_payoffs",
      [](const std::optional<std::string>& config, std::optional<int> drops,
         std::optional<std::uint64_t> seed, int jobs) {
        lte::CellConfig c = config ? lte::load_cell_config(*config) : lte::default_cell_config();
        if (drops) c.drops = *drops;
        if (seed) c.seed = *seed;
        c.jobs = jobs;
        lte::PayoffEstimate e;
        {
          py::gil_scoped_release release;
          e = lte::build_payoff_matrices(c);
        }
        std::vector<Rows> se;
        for (const Matrix& s : e.standard_error) se.push_back(from_matrix(s));
        return py::make_tuple(e.game, se);
      },
      py::arg("config") = py::none(), py::arg("drops") = py::none(), py::arg("seed") = py::none(),
      py::arg("jobs") = 1,
      "Monte-Carlo payoff matrices from a cell config JSON document; returns (game, standard_errors)");

  m.def("default_cell_config", [] { return lte::save_cell_config(lte::default_cell_config()); });
}
