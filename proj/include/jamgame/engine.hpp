#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "jamgame/game_model.hpp"
#include "jamgame/informed.hpp"
#include "jamgame/uninformed.hpp"

namespace jamgame {

enum class EnbStrategyKind { kApproximated, kExpected };
enum class Monitoring { kFull, kNone };

struct MatchConfig {
  GameSpec game;
  std::size_t true_state = 0;
  BeliefState prior;  // empty: use game.prior
  EnbStrategyKind enb = EnbStrategyKind::kApproximated;
  double lambda = 0.9;
  int horizon = 4;
  int stages = 30;
  std::uint64_t seed = 0;
  Monitoring monitoring = Monitoring::kFull;
  RegretInit regret_init = RegretInit::kMassNormalized;
  double regret_snap = kDefaultRegretSnap;  // see settle_regret(); 0 disables

  // Throws DataError; the approximated eNodeB needs full monitoring.
  void validate() const;
  // Game with lambda and the effective prior applied.
  GameSpec effective_game() const;
};

struct StageRecord {
  int t = 0;
  std::size_t a_j = 0;
  std::size_t a_0 = 0;
  InformedPolicy jammer_policy;
  UninformedPolicy enb_policy;
  BeliefState belief;   // posterior after this stage's observation
  RegretVector regret;  // regret after this stage's update
  double stage_u = 0.0;  // jammer payoff U^theta(a_j, a_0)
  double disc_u = 0.0;   // sum_{s<=t} lambda (1-lambda)^(s-1) stage_u
};

struct Trajectory {
  std::size_t true_state = 0;
  double lambda = 0.9;
  double max_abs_payoff = 0.0;
  std::vector<StageRecord> stages;

  // (1-lambda)^N max|U|: what the unplayed stages could still add.
  double tail_bound() const;
};

struct DiscountedUtility {
  double value = 0.0;  // jammer's; the eNodeB's is the negation
  double tail_bound = 0.0;
};

DiscountedUtility discounted_utility(const Trajectory& trajectory);

// eNodeB strategies as seen by the engine. Only MonitoringEnbPlayer can
// receive the jammer's action, and only when monitoring is full.
class EnbPlayer {
 public:
  virtual ~EnbPlayer() = default;
  virtual UninformedPolicy policy() = 0;
};

class MonitoringEnbPlayer : public EnbPlayer {
 public:
  virtual void observe(std::size_t jammer_action) = 0;
};

class ApproximatedEnbPlayer : public MonitoringEnbPlayer {
 public:
  ApproximatedEnbPlayer(const GameSpec& game, const BeliefState& prior, int horizon,
                        RegretInit init = RegretInit::kMassNormalized,
                        double snap_tol = kDefaultRegretSnap);
  UninformedPolicy policy() override { return agent_.policy(); }
  void observe(std::size_t jammer_action) override { agent_.observe(jammer_action); }

 private:
  UninformedAgent agent_;
};

class ExpectedEnbPlayer : public EnbPlayer {
 public:
  ExpectedEnbPlayer(const GameSpec& game, const BeliefState& prior);
  UninformedPolicy policy() override { return policy_; }

 private:
  UninformedPolicy policy_;
};

// Plays config.stages stages with the eNodeB strategy named in the config.
Trajectory play_match(const MatchConfig& config);
// Same, with a caller-supplied eNodeB. The config's enb kind is ignored.
Trajectory play_match(const MatchConfig& config, EnbPlayer& enb);

// Trajectory CSV: t, a_j, a_0, p_1..p_n, w_1..w_n, stage_u, disc_u.
// Actions are 1-based.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

// Fixed-point decimal, independent of the global locale.
std::string format_fixed(double value, int precision = 10);

// Prior with mass `value` on `state` and the rest spread over the other
// states in proportion to `base` (uniformly if base has no mass there).
BeliefState prior_with_mass(const BeliefState& base, std::size_t state, double value);

struct SweepConfig {
  MatchConfig base;           // prior is replaced per grid point
  std::vector<double> grid;   // probability of base.true_state
  int window = 10;            // steady state = mean over the last `window` stages
  int replicates = 1;         // matches per grid point, averaged
  double convergence_tol = 1e-3;
  int jobs = 1;
};

struct SweepRow {
  BeliefState prior;
  MixedAction jammer_policy;  // true-state column, steady-state mean
  UninformedPolicy enb_policy;  // steady-state mean
  BeliefState final_belief;   // mean over replicates
  double disc_u = 0.0;        // jammer's, mean over replicates
  double convergence_stage = 0.0;  // mean over replicates; -1 if any never settles
};

// Mean of the last `window` eNodeB and true-state jammer policies.
void steady_state(const Trajectory& trajectory, int window, MixedAction& jammer,
                  UninformedPolicy& enb);

// First stage t from which every later eNodeB policy stays within `tol`
// (L1) of its predecessor until the end of the trajectory; -1 if fewer than
// `hold` such steps follow t.
int convergence_stage(const Trajectory& trajectory, double tol, int hold);

// Rows come back in grid order regardless of `jobs`.
std::vector<SweepRow> sweep_prior(const SweepConfig& config);

// One row per grid point: prior_1..n, x_1..x_|Aj|, y_1..y_|A0|,
// belief_1..n, disc_u, converged_t.
void write_sweep_csv(std::ostream& out, const GameSpec& game, const std::vector<SweepRow>& rows);

}  // namespace jamgame
