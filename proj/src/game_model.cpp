#include "jamgame/game_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jamgame/errors.hpp"

namespace jamgame {

using ordered_json = nlohmann::ordered_json;

void validate_distribution(std::span<const double> probs, std::string_view what, double tol) {
  if (probs.empty()) throw DataError(std::string(what) + " is empty");
  double total = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < -tol)
      throw DataError(std::string(what) + " has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > tol) throw DataError(std::string(what) + " not normalized");
}

std::vector<double> renormalized(std::span<const double> probs) {
  std::vector<double> out(probs.begin(), probs.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (total <= 0.0) throw SolverError("cannot renormalize an all-zero vector");
  for (double& v : out) v /= total;
  return out;
}

ActionSet::ActionSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("action set must not be empty");
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) throw DataError("action labels must be distinct");
}

std::size_t ActionSet::index_of(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw DataError("unknown action '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

MixedAction MixedAction::point_mass(std::size_t size, std::size_t action) {
  MixedAction m{std::vector<double>(size, 0.0)};
  m.probs.at(action) = 1.0;
  return m;
}

MixedAction MixedAction::uniform(std::size_t size) {
  return MixedAction{std::vector<double>(size, 1.0 / static_cast<double>(size))};
}

bool StateDependentStrategy::state_independent() const {
  for (std::size_t s = 1; s < per_state.size(); ++s)
    if (per_state[s].probs != per_state[0].probs) return false;
  return true;
}

std::size_t GameSpec::state_index(std::string_view label) const {
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::string a = states[s], b(label);
    std::transform(a.begin(), a.end(), a.begin(), ::tolower);
    std::transform(b.begin(), b.end(), b.begin(), ::tolower);
    if (a == b) return s;
  }
  throw DataError("unknown state '" + std::string(label) + "'");
}

double GameSpec::max_abs_payoff() const {
  double m = 0.0;
  for (const auto& u : payoff)
    for (double v : u.data()) m = std::max(m, std::abs(v));
  return m;
}

void GameSpec::validate() const {
  if (states.empty()) throw DataError("game needs at least one state");
  std::set<std::string> seen(states.begin(), states.end());
  if (seen.size() != states.size()) throw DataError("state labels must be distinct");
  if (jammer_actions.size() == 0 || enb_actions.size() == 0)
    throw DataError("action sets must not be empty");
  if (payoff.size() != states.size()) throw DataError("need one payoff matrix per state");
  for (const auto& u : payoff) {
    if (u.rows() != jammer_actions.size() || u.cols() != enb_actions.size())
      throw DataError("payoff matrix shape mismatch");
    for (double v : u.data())
      if (!std::isfinite(v)) throw DataError("payoff matrix has non-finite entries");
  }
  if (prior.size() != states.size()) throw DataError("prior length must match states");
  validate_distribution(prior.probs, "prior");
  if (!(discount > 0.0 && discount < 1.0)) throw DataError("lambda must lie in (0, 1)");
  if (horizon < 1) throw DataError("horizon must be >= 1");
}

GameSpec GameSpec::with_prior(std::vector<double> p) const {
  GameSpec g = *this;
  g.prior = BeliefState{std::move(p)};
  g.validate();
  return g;
}

namespace {

std::vector<std::string> string_list(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw DataError(std::string("missing or malformed field '") + key + "'");
  std::vector<std::string> out;
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw DataError(std::string("field '") + key + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Matrix matrix_from_json(const ordered_json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw DataError(what + " must be a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw DataError(what + " rows must be arrays");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw DataError(what + " is ragged");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw DataError(what + " entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

}  // namespace

GameSpec load_game(std::string_view document) {
  ordered_json j;
  try {
    j = ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed scenario document: ") + e.what());
  }
  if (!j.is_object()) throw DataError("scenario document must be an object");

  GameSpec g;
  g.states = string_list(j, "states");
  g.jammer_actions = ActionSet(string_list(j, "jammer_actions"));
  g.enb_actions = ActionSet(string_list(j, "enb_actions"));

  if (!j.contains("payoff") || !j["payoff"].is_object())
    throw DataError("missing or malformed field 'payoff'");
  for (const auto& s : g.states) {
    if (!j["payoff"].contains(s)) throw DataError("no payoff matrix for state '" + s + "'");
    g.payoff.push_back(matrix_from_json(j["payoff"][s], "payoff[" + s + "]"));
  }
  if (j["payoff"].size() != g.states.size())
    throw DataError("payoff has matrices for unknown states");

  if (!j.contains("prior") || !j["prior"].is_array())
    throw DataError("missing or malformed field 'prior'");
  for (const auto& v : j["prior"]) {
    if (!v.is_number()) throw DataError("prior entries must be numbers");
    g.prior.probs.push_back(v.get<double>());
  }
  if (!j.contains("lambda") || !j["lambda"].is_number())
    throw DataError("missing or malformed field 'lambda'");
  g.discount = j["lambda"].get<double>();
  if (j.contains("horizon")) {
    if (!j["horizon"].is_number_integer()) throw DataError("horizon must be an integer");
    g.horizon = j["horizon"].get<int>();
  }
  g.validate();
  return g;
}

GameSpec load_game_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_game(ss.str());
}

std::string save_game(const GameSpec& game) {
  game.validate();
  ordered_json j;
  j["states"] = game.states;
  j["jammer_actions"] = game.jammer_actions.labels();
  j["enb_actions"] = game.enb_actions.labels();
  ordered_json payoff = ordered_json::object();
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    ordered_json rows = ordered_json::array();
    const Matrix& u = game.payoff[s];
    for (std::size_t r = 0; r < u.rows(); ++r) {
      auto row = u.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    payoff[game.states[s]] = rows;
  }
  j["payoff"] = payoff;
  j["prior"] = game.prior.probs;
  j["lambda"] = game.discount;
  j["horizon"] = game.horizon;
  return j.dump(2) + "\n";
}

GameSpec bundled_game() { return load_game(bundled_scenario_document()); }

double expected_payoff(const GameSpec& game, const BeliefState& p,
                       const StateDependentStrategy& x, const MixedAction& y) {
  const std::size_t ns = game.num_states();
  const std::size_t nj = game.num_jammer_actions();
  const std::size_t n0 = game.num_enb_actions();
  if (p.size() != ns || x.num_states() != ns || y.size() != n0)
    throw DataError("expected_payoff: dimension mismatch");
  double total = 0.0;
  for (std::size_t s = 0; s < ns; ++s) {
    const MixedAction& xs = x.column(s);
    if (xs.size() != nj) throw DataError("expected_payoff: dimension mismatch");
    double v = 0.0;
    for (std::size_t a = 0; a < nj; ++a)
      for (std::size_t b = 0; b < n0; ++b) v += xs[a] * game.payoff[s](a, b) * y[b];
    total += p[s] * v;
  }
  return total;
}

}  // namespace jamgame
