#pragma once

#include <vector>

#include "jamgame/game_model.hpp"
#include "jamgame/uninformed.hpp"

namespace jamgame {

// Prior-weighted mixture of the per-state complete-information security
// strategies of the eNodeB. The per-state strategies are solved once.
class ExpectedStrategy {
 public:
  explicit ExpectedStrategy(const GameSpec& game);

  // y*_theta, the column player's security mix for state theta.
  const std::vector<MixedAction>& per_state() const { return per_state_; }
  // sum_theta p0^theta y*_theta
  UninformedPolicy policy(const BeliefState& p0) const;

 private:
  std::vector<MixedAction> per_state_;
};

UninformedPolicy expected_policy(const GameSpec& game, const BeliefState& p0);

}  // namespace jamgame
