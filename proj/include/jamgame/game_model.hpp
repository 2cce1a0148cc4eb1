#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jamgame/matrix.hpp"

namespace jamgame {

// Tolerance for validating probability vectors handed in by callers.
inline constexpr double kProbabilityTol = 1e-9;
// Tolerance for distributions produced by the LP engine.
inline constexpr double kSolverProbabilityTol = 1e-6;

// Throws DataError unless entries are >= -tol and sum to 1 within tol.
void validate_distribution(std::span<const double> probs, std::string_view what,
                           double tol = kProbabilityTol);

// Clamps negatives to zero and rescales to sum 1. Used to absorb LP round-off.
std::vector<double> renormalized(std::span<const double> probs);

class ActionSet {
 public:
  ActionSet() = default;
  explicit ActionSet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  // Throws DataError for unknown labels.
  std::size_t index_of(std::string_view label) const;

  friend bool operator==(const ActionSet&, const ActionSet&) = default;

 private:
  std::vector<std::string> labels_;
};

// Probability vector over one action set.
struct MixedAction {
  std::vector<double> probs;

  static MixedAction point_mass(std::size_t size, std::size_t action);
  static MixedAction uniform(std::size_t size);
  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

// Probability vector over the states of nature.
struct BeliefState {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
  friend bool operator==(const BeliefState&, const BeliefState&) = default;
};

// One mixed jammer action per state. Viewed as an |A_j| x |states| matrix,
// column theta is what the jammer plays when the true state is theta.
struct StateDependentStrategy {
  std::vector<MixedAction> per_state;

  std::size_t num_states() const { return per_state.size(); }
  const MixedAction& column(std::size_t state) const { return per_state.at(state); }
  // True when every column assigns identical probabilities.
  bool state_independent() const;
};

using InformedPolicy = StateDependentStrategy;

// Zero-sum game with one-sided information. Payoffs are the jammer's
// (maximizer's); the eNodeB's utility is their negation.
struct GameSpec {
  std::vector<std::string> states;
  ActionSet jammer_actions;
  ActionSet enb_actions;
  std::vector<Matrix> payoff;  // one |A_j| x |A_0| matrix per state
  BeliefState prior;
  double discount = 0.9;  // lambda
  int horizon = 4;        // receding horizon T

  std::size_t num_states() const { return states.size(); }
  std::size_t num_jammer_actions() const { return jammer_actions.size(); }
  std::size_t num_enb_actions() const { return enb_actions.size(); }
  std::size_t state_index(std::string_view label) const;

  // The eNodeB's utility U_0 = -U_j.
  double enb_utility(std::size_t state, std::size_t a_j, std::size_t a_0) const {
    return -payoff[state](a_j, a_0);
  }
  double max_abs_payoff() const;

  // Throws DataError on any invariant violation.
  void validate() const;

  // Same game with a different common prior.
  GameSpec with_prior(std::vector<double> prior) const;
};

GameSpec load_game(std::string_view document);
GameSpec load_game_file(const std::string& path);
std::string save_game(const GameSpec& game);

// The bundled two-state Cheater/Saboteur scenario.
GameSpec bundled_game();
std::string_view bundled_scenario_document();

// sum_theta p^theta (x^theta)^T U^theta y
double expected_payoff(const GameSpec& game, const BeliefState& p,
                       const StateDependentStrategy& x, const MixedAction& y);

}  // namespace jamgame
