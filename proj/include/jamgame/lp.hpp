#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "jamgame/matrix.hpp"

namespace jamgame {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };

//   optimize  objective . z
//   s.t.      ineq_lhs z <= ineq_rhs
//             eq_lhs z    = eq_rhs
//             lower <= z <= upper
// Empty lower/upper default to z >= 0.
struct LinearProgram {
  Sense sense = Sense::kMinimize;
  std::vector<double> objective;
  Matrix ineq_lhs;
  std::vector<double> ineq_rhs;
  Matrix eq_lhs;
  std::vector<double> eq_rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return objective.size(); }
  // Throws DataError if the blocks disagree on dimensions.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  std::vector<double> point;
  // Shadow prices of the inequality rows: d(value)/d(ineq_rhs[i]).
  std::vector<double> dual_point;
  // Shadow prices of the equality rows.
  std::vector<double> eq_dual_point;
  std::size_t iterations = 0;
};

enum class PivotRule {
  // Bland's smallest-index rule throughout.
  kBland,
  // Most negative reduced cost; switches to Bland while a degenerate streak
  // lasts so cycling is impossible.
  kDantzigBlandFallback,
};

struct LpOptions {
  PivotRule rule = PivotRule::kDantzigBlandFallback;
  std::size_t max_iterations = 200000;
  // Consecutive degenerate pivots tolerated before falling back to Bland.
  std::size_t degenerate_streak = 50;
  double feasibility_tol = 1e-7;
};

// Two-phase dense tableau simplex. Deterministic for a fixed input. Throws
// SolverError when the iteration budget runs out or the final point fails
// its feasibility re-check.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_mix;  // maximizer
  std::vector<double> col_mix;  // minimizer
};

// Value and optimal mixed strategies of the zero-sum game where the row
// player maximizes payoff(i, j).
MatrixGameSolution solve_matrix_game(const Matrix& payoff, const LpOptions& options = {});

// min_j (x^T M)_j: what row mix x guarantees.
double row_guarantee(const Matrix& payoff, const std::vector<double>& row_mix);
// max_i (M y)_i: what column mix y concedes at most.
double col_guarantee(const Matrix& payoff, const std::vector<double>& col_mix);

}  // namespace jamgame
