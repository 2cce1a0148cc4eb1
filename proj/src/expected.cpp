#include "jamgame/expected.hpp"

#include "jamgame/errors.hpp"
#include "jamgame/lp.hpp"

namespace jamgame {

ExpectedStrategy::ExpectedStrategy(const GameSpec& game) {
  game.validate();
  per_state_.reserve(game.num_states());
  for (const Matrix& u : game.payoff) per_state_.push_back({solve_matrix_game(u).col_mix});
}

UninformedPolicy ExpectedStrategy::policy(const BeliefState& p0) const {
  validate_distribution(p0.probs, "prior");
  if (p0.size() != per_state_.size()) throw DataError("prior size mismatch");
  UninformedPolicy y{std::vector<double>(per_state_.front().size(), 0.0)};
  for (std::size_t s = 0; s < per_state_.size(); ++s)
    for (std::size_t b = 0; b < y.size(); ++b) y.probs[b] += p0[s] * per_state_[s][b];
  return y;
}

UninformedPolicy expected_policy(const GameSpec& game, const BeliefState& p0) {
  return ExpectedStrategy(game).policy(p0);
}

}  // namespace jamgame
