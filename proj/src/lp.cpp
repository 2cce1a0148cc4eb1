#include "jamgame/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jamgame/errors.hpp"

namespace jamgame {

void LinearProgram::validate() const {
  const std::size_t n = num_vars();
  if (n == 0) throw DataError("LP has no variables");
  if (!ineq_lhs.empty() && ineq_lhs.cols() != n)
    throw DataError("inequality block has wrong column count");
  if (ineq_lhs.rows() != ineq_rhs.size())
    throw DataError("inequality block rows disagree with rhs");
  if (!eq_lhs.empty() && eq_lhs.cols() != n)
    throw DataError("equality block has wrong column count");
  if (eq_lhs.rows() != eq_rhs.size()) throw DataError("equality block rows disagree with rhs");
  if (!lower.empty() && lower.size() != n) throw DataError("lower bounds have wrong size");
  if (!upper.empty() && upper.size() != n) throw DataError("upper bounds have wrong size");
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kDropTol = 1e-14;
constexpr double kHarrisTol = 1e-9;
constexpr double kPhaseOneTol = 1e-11;
constexpr double kPerturbation = 1e-7;
constexpr double kPrimalTol = 1e-10;

// How an original variable is expressed through nonnegative tableau columns.
struct VarMap {
  enum class Kind { kShift, kFlip, kSplit } kind = Kind::kShift;
  std::size_t col = 0;
  double offset = 0.0;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), width_(cols + 2), t_(rows * width_, 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }
  // Working (possibly perturbed) rhs, and the unperturbed rhs carried along.
  double& rhs(std::size_t r) { return at(r, width_ - 2); }
  double& true_rhs(std::size_t r) { return at(r, width_ - 1); }
  double* row(std::size_t r) { return t_.data() + r * width_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return width_ - 2; }
  std::vector<std::size_t>& basis() { return basis_; }

  // Objective rows hold reduced costs; the rhs slots hold -objective.
  std::vector<double>& cost(int which) { return which == 0 ? phase1_ : phase2_; }

  // Drop the perturbation: the working rhs becomes the true one.
  void restore_rhs() {
    for (std::size_t i = 0; i < rows_; ++i) rhs(i) = true_rhs(i);
    phase1_[width_ - 2] = phase1_[width_ - 1];
    phase2_[width_ - 2] = phase2_[width_ - 1];
  }

  void init_costs() {
    phase1_.assign(width_, 0.0);
    phase2_.assign(width_, 0.0);
  }

  void pivot(std::size_t r, std::size_t s) {
    double* pr = row(r);
    const double inv = 1.0 / pr[s];
    nz_.clear();
    for (std::size_t k = 0; k < width_; ++k) {
      if (pr[k] == 0.0) continue;
      pr[k] *= inv;
      if (std::abs(pr[k]) < kDropTol) {
        pr[k] = 0.0;
        continue;
      }
      nz_.push_back(k);
    }
    pr[s] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      eliminate(row(i), pr, s);
    }
    eliminate(phase1_.data(), pr, s);
    eliminate(phase2_.data(), pr, s);
    basis_[r] = s;
  }

 private:
  void eliminate(double* target, const double* pr, std::size_t s) {
    const double f = target[s];
    if (f == 0.0) return;
    for (std::size_t k : nz_) target[k] -= f * pr[k];
    target[s] = 0.0;
  }

  std::size_t rows_;
  std::size_t width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<double> phase1_, phase2_;
  std::vector<std::size_t> nz_;
};

enum class PhaseResult { kOptimal, kUnbounded };

class SimplexRun {
 public:
  SimplexRun(Tableau& tab, std::size_t enterable, const LpOptions& opt)
      : tab_(tab), enterable_(enterable), opt_(opt) {}

  PhaseResult run(int phase) {
    auto& d = tab_.cost(phase);
    bool bland = opt_.rule == PivotRule::kBland;
    std::size_t streak = 0;
    while (true) {
      if (iterations_ >= opt_.max_iterations)
        throw SolverError("simplex stalled: iteration limit " +
                          std::to_string(opt_.max_iterations) + " reached");
      // Phase one is done once the artificials are all at zero.
      if (phase == 0 && -d[tab_.cols()] <= kPhaseOneTol) return PhaseResult::kOptimal;
      const bool use_bland = bland || streak >= opt_.degenerate_streak;
      std::size_t s = enterable_;
      double best = -kCostTol;
      for (std::size_t j = 0; j < enterable_; ++j) {
        if (d[j] < best) {
          s = j;
          if (use_bland) break;
          best = d[j];
        }
      }
      if (s == enterable_) return PhaseResult::kOptimal;

      const std::size_t r = use_bland ? bland_row(s) : harris_row(s);
      if (r == tab_.rows()) return PhaseResult::kUnbounded;
      const double min_ratio = std::max(tab_.rhs(r), 0.0) / tab_.at(r, s);
      streak = min_ratio <= 1e-12 ? streak + 1 : 0;
      tab_.pivot(r, s);
      ++iterations_;
    }
  }

  // Dual simplex on a dual feasible basis with slightly negative rhs
  // entries. Returns false if some row cannot be repaired.
  bool repair(int phase) {
    auto& d = tab_.cost(phase);
    while (true) {
      if (iterations_ >= opt_.max_iterations)
        throw SolverError("simplex stalled: iteration limit " +
                          std::to_string(opt_.max_iterations) + " reached");
      std::size_t r = tab_.rows();
      double worst = -kPrimalTol;
      for (std::size_t i = 0; i < tab_.rows(); ++i) {
        if (tab_.rhs(i) < worst) {
          worst = tab_.rhs(i);
          r = i;
        }
      }
      if (r == tab_.rows()) return true;
      double limit = kInf;
      for (std::size_t j = 0; j < enterable_; ++j) {
        const double a = tab_.at(r, j);
        if (a >= -kPivotTol) continue;
        limit = std::min(limit, (std::max(d[j], 0.0) + kCostTol) / -a);
      }
      std::size_t s = enterable_;
      double piv = 0.0;
      for (std::size_t j = 0; j < enterable_; ++j) {
        const double a = tab_.at(r, j);
        if (a >= -kPivotTol) continue;
        if (std::max(d[j], 0.0) / -a <= limit && -a > piv) {
          s = j;
          piv = -a;
        }
      }
      if (s == enterable_) return false;
      tab_.pivot(r, s);
      ++iterations_;
    }
  }

  std::size_t iterations() const { return iterations_; }

 private:
  // Smallest ratio; ties go to the smallest basic index.
  std::size_t bland_row(std::size_t s) const {
    std::size_t r = tab_.rows();
    double min_ratio = kInf;
    for (std::size_t i = 0; i < tab_.rows(); ++i) {
      const double a = tab_.at(i, s);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(tab_.rhs(i), 0.0) / a;
      if (r == tab_.rows() || ratio < min_ratio - 1e-12 ||
          (ratio <= min_ratio + 1e-12 && tab_.basis()[i] < tab_.basis()[r])) {
        r = i;
        min_ratio = std::min(min_ratio, ratio);
      }
    }
    return r;
  }

  // Harris two-pass test: relax the bounds by kHarrisTol to find the step
  // limit, then take the largest pivot element among rows within it.
  std::size_t harris_row(std::size_t s) const {
    double limit = kInf;
    for (std::size_t i = 0; i < tab_.rows(); ++i) {
      const double a = tab_.at(i, s);
      if (a <= kPivotTol) continue;
      limit = std::min(limit, (std::max(tab_.rhs(i), 0.0) + kHarrisTol) / a);
    }
    std::size_t r = tab_.rows();
    double piv = 0.0;
    for (std::size_t i = 0; i < tab_.rows(); ++i) {
      const double a = tab_.at(i, s);
      if (a <= kPivotTol) continue;
      if (std::max(tab_.rhs(i), 0.0) / a <= limit && a > piv) {
        r = i;
        piv = a;
      }
    }
    return r;
  }

  Tableau& tab_;
  std::size_t enterable_;
  const LpOptions& opt_;
  std::size_t iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  const std::size_t n_ineq = lp.ineq_rhs.size();
  const std::size_t n_eq = lp.eq_rhs.size();

  auto lower_of = [&](std::size_t j) { return lp.lower.empty() ? 0.0 : lp.lower[j]; };
  auto upper_of = [&](std::size_t j) { return lp.upper.empty() ? kInf : lp.upper[j]; };

  LpSolution result;

  // Map original variables onto nonnegative columns; finite two-sided bounds
  // become extra inequality rows.
  std::vector<VarMap> vars(n);
  std::vector<std::pair<std::size_t, double>> bound_rows;  // (column, limit)
  std::size_t ncols = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lower_of(j), hi = upper_of(j);
    if (lo > hi) return result;  // infeasible box
    if (std::isfinite(lo)) {
      vars[j] = {VarMap::Kind::kShift, ncols++, lo};
      if (std::isfinite(hi)) bound_rows.emplace_back(vars[j].col, hi - lo);
    } else if (std::isfinite(hi)) {
      vars[j] = {VarMap::Kind::kFlip, ncols++, hi};
    } else {
      vars[j] = {VarMap::Kind::kSplit, ncols, 0.0};
      ncols += 2;
    }
  }
  const std::size_t n_struct = ncols;
  const std::size_t n_le = n_ineq + bound_rows.size();
  const std::size_t m = n_le + n_eq;

  // Row assembly in structural columns plus adjusted rhs.
  std::vector<std::vector<double>> rows(m, std::vector<double>(n_struct, 0.0));
  std::vector<double> rhs(m, 0.0);
  auto place = [&](std::vector<double>& dst, double& b, std::span<const double> src) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = src[j];
      if (a == 0.0) continue;
      const VarMap& v = vars[j];
      switch (v.kind) {
        case VarMap::Kind::kShift:
          dst[v.col] += a;
          b -= a * v.offset;
          break;
        case VarMap::Kind::kFlip:
          dst[v.col] -= a;
          b -= a * v.offset;
          break;
        case VarMap::Kind::kSplit:
          dst[v.col] += a;
          dst[v.col + 1] -= a;
          break;
      }
    }
  };
  for (std::size_t i = 0; i < n_ineq; ++i) {
    rhs[i] = lp.ineq_rhs[i];
    place(rows[i], rhs[i], lp.ineq_lhs.row(i));
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    rows[n_ineq + k][bound_rows[k].first] = 1.0;
    rhs[n_ineq + k] = bound_rows[k].second;
  }
  for (std::size_t i = 0; i < n_eq; ++i) {
    rhs[n_le + i] = lp.eq_rhs[i];
    place(rows[n_le + i], rhs[n_le + i], lp.eq_lhs.row(i));
  }

  // Columns: structural | slack (one per <= row) | artificial (as needed).
  std::vector<bool> negated(m, false);
  std::vector<std::size_t> artificial_of(m, SIZE_MAX);
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    negated[i] = rhs[i] < 0.0;
    if (i >= n_le || negated[i]) artificial_of[i] = n_art++;
  }
  const std::size_t slack0 = n_struct;
  const std::size_t art0 = slack0 + n_le;
  const double sense = lp.sense == Sense::kMaximize ? -1.0 : 1.0;
  const double tol = options.feasibility_tol;

  // One pass of the two-phase method. With `perturb` set, the rhs is shifted
  // by small distinct amounts to break degeneracy; the final basis is then
  // repaired against the true rhs with dual simplex pivots.
  auto attempt = [&](bool perturb) -> LpSolution {
    LpSolution out;
    Tableau tab(m, art0 + n_art);
    tab.init_costs();
    for (std::size_t i = 0; i < m; ++i) {
      const double sgn = negated[i] ? -1.0 : 1.0;
      double* r = tab.row(i);
      for (std::size_t j = 0; j < n_struct; ++j) r[j] = sgn * rows[i][j];
      if (i < n_le) r[slack0 + i] = sgn;
      tab.true_rhs(i) = sgn * rhs[i];
      tab.rhs(i) = tab.true_rhs(i);
      if (perturb) {
        const double u = 0.5 + 0.5 * std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
        tab.rhs(i) += kPerturbation * u * (1.0 + std::abs(rhs[i]));
      }
      if (artificial_of[i] != SIZE_MAX) {
        r[art0 + artificial_of[i]] = 1.0;
        tab.basis()[i] = art0 + artificial_of[i];
      } else {
        tab.basis()[i] = slack0 + i;
      }
    }

    // Internal objective is always minimization.
    auto& c2 = tab.cost(1);
    for (std::size_t j = 0; j < n; ++j) {
      const double c = sense * lp.objective[j];
      const VarMap& v = vars[j];
      switch (v.kind) {
        case VarMap::Kind::kShift:
          c2[v.col] += c;
          break;
        case VarMap::Kind::kFlip:
          c2[v.col] -= c;
          break;
        case VarMap::Kind::kSplit:
          c2[v.col] += c;
          c2[v.col + 1] -= c;
          break;
      }
    }

    const std::size_t rhs_col = art0 + n_art;
    SimplexRun run(tab, art0, options);
    if (n_art > 0) {
      auto& c1 = tab.cost(0);
      for (std::size_t i = 0; i < m; ++i) {
        if (artificial_of[i] == SIZE_MAX) continue;
        const double* r = tab.row(i);
        for (std::size_t k = 0; k < art0; ++k) c1[k] -= r[k];
        c1[rhs_col] -= r[rhs_col];
        c1[rhs_col + 1] -= r[rhs_col + 1];
      }
      run.run(0);
      double scale = 1.0;
      for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(tab.rhs(i)));
      if (-c1[rhs_col] > tol * scale) {
        out.iterations = run.iterations();
        return out;
      }
      // Drive zero-level artificials out of the basis where possible.
      for (std::size_t i = 0; i < m; ++i) {
        if (tab.basis()[i] < art0) continue;
        for (std::size_t k = 0; k < art0; ++k) {
          if (std::abs(tab.at(i, k)) > kPivotTol) {
            tab.pivot(i, k);
            break;
          }
        }
      }
    }

    PhaseResult pr = run.run(1);
    if (pr == PhaseResult::kOptimal && perturb) {
      tab.restore_rhs();
      if (!run.repair(1)) throw SolverError("simplex stalled: perturbation repair failed");
      pr = run.run(1);
    }
    out.iterations = run.iterations();
    if (pr == PhaseResult::kUnbounded) {
      out.status = LpStatus::kUnbounded;
      return out;
    }

    std::vector<double> x(art0 + n_art, 0.0);
    for (std::size_t i = 0; i < m; ++i) x[tab.basis()[i]] = tab.rhs(i);
    out.point.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const VarMap& v = vars[j];
      switch (v.kind) {
        case VarMap::Kind::kShift:
          out.point[j] = v.offset + x[v.col];
          break;
        case VarMap::Kind::kFlip:
          out.point[j] = v.offset - x[v.col];
          break;
        case VarMap::Kind::kSplit:
          out.point[j] = x[v.col] - x[v.col + 1];
          break;
      }
    }
    out.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) out.value += lp.objective[j] * out.point[j];

    const auto& d = tab.cost(1);
    out.dual_point.assign(n_ineq, 0.0);
    for (std::size_t i = 0; i < n_ineq; ++i) {
      const double s = negated[i] ? -1.0 : 1.0;
      out.dual_point[i] = sense * s * (-d[slack0 + i] / s);
    }
    out.eq_dual_point.assign(n_eq, 0.0);
    for (std::size_t i = 0; i < n_eq; ++i) {
      const std::size_t row = n_le + i;
      const double s = negated[row] ? -1.0 : 1.0;
      out.eq_dual_point[i] = sense * s * -d[art0 + artificial_of[row]];
    }

    // Re-verify against the original constraints.
    auto fail = [](const std::string& what) {
      throw SolverError("simplex stalled: numerical failure (" + what + ")");
    };
    for (std::size_t i = 0; i < n_ineq; ++i) {
      double lhs = 0.0;
      const auto r = lp.ineq_lhs.row(i);
      for (std::size_t j = 0; j < n; ++j) lhs += r[j] * out.point[j];
      if (lhs > lp.ineq_rhs[i] + tol * (1.0 + std::abs(lp.ineq_rhs[i])))
        fail("inequality row " + std::to_string(i));
    }
    for (std::size_t i = 0; i < n_eq; ++i) {
      double lhs = 0.0;
      const auto r = lp.eq_lhs.row(i);
      for (std::size_t j = 0; j < n; ++j) lhs += r[j] * out.point[j];
      if (std::abs(lhs - lp.eq_rhs[i]) > tol * (1.0 + std::abs(lp.eq_rhs[i])))
        fail("equality row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (out.point[j] < lower_of(j) - tol || out.point[j] > upper_of(j) + tol)
        fail("bound on variable " + std::to_string(j));
    }
    out.status = LpStatus::kOptimal;
    return out;
  };

  // The perturbed pass can fail on degenerate equality systems (e.g. repeated
  // rows); fall back to the plain method.
  try {
    LpSolution out = attempt(true);
    if (out.status != LpStatus::kInfeasible) return out;
  } catch (const SolverError&) {
  }
  return attempt(false);
}

MatrixGameSolution solve_matrix_game(const Matrix& payoff, const LpOptions& options) {
  const std::size_t m = payoff.rows(), n = payoff.cols();
  if (m == 0 || n == 0) throw DataError("empty payoff matrix");
  for (double v : payoff.data())
    if (!std::isfinite(v)) throw DataError("payoff matrix has non-finite entries");

  MatrixGameSolution out;

  // Row player: max v s.t. x^T M_{:,j} >= v, sum x = 1, x >= 0, v free.
  {
    LinearProgram lp;
    lp.sense = Sense::kMaximize;
    lp.objective.assign(m + 1, 0.0);
    lp.objective[m] = 1.0;
    lp.ineq_lhs = Matrix(n, m + 1);
    lp.ineq_rhs.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) lp.ineq_lhs(j, i) = -payoff(i, j);
      lp.ineq_lhs(j, m) = 1.0;
    }
    lp.eq_lhs = Matrix(1, m + 1);
    for (std::size_t i = 0; i < m; ++i) lp.eq_lhs(0, i) = 1.0;
    lp.eq_rhs = {1.0};
    lp.lower.assign(m + 1, 0.0);
    lp.upper.assign(m + 1, kInf);
    lp.lower[m] = -kInf;
    const LpSolution sol = solve_lp(lp, options);
    if (sol.status != LpStatus::kOptimal) throw SolverError("matrix game LP not optimal");
    out.value = sol.value;
    out.row_mix.assign(sol.point.begin(), sol.point.begin() + m);
  }
  // Column player: min v s.t. M_{i,:} y <= v, sum y = 1, y >= 0, v free.
  {
    LinearProgram lp;
    lp.sense = Sense::kMinimize;
    lp.objective.assign(n + 1, 0.0);
    lp.objective[n] = 1.0;
    lp.ineq_lhs = Matrix(m, n + 1);
    lp.ineq_rhs.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) lp.ineq_lhs(i, j) = payoff(i, j);
      lp.ineq_lhs(i, n) = -1.0;
    }
    lp.eq_lhs = Matrix(1, n + 1);
    for (std::size_t j = 0; j < n; ++j) lp.eq_lhs(0, j) = 1.0;
    lp.eq_rhs = {1.0};
    lp.lower.assign(n + 1, 0.0);
    lp.upper.assign(n + 1, kInf);
    lp.lower[n] = -kInf;
    const LpSolution sol = solve_lp(lp, options);
    if (sol.status != LpStatus::kOptimal) throw SolverError("matrix game LP not optimal");
    out.col_mix.assign(sol.point.begin(), sol.point.begin() + n);
  }

  auto clean = [](std::vector<double>& mix) {
    double total = 0.0;
    for (double& v : mix) {
      v = std::max(v, 0.0);
      total += v;
    }
    for (double& v : mix) v /= total;
  };
  clean(out.row_mix);
  clean(out.col_mix);

  // Security certificate: both mixes must guarantee the value.
  const double tol = 1e-6 * (1.0 + std::abs(out.value));
  if (row_guarantee(payoff, out.row_mix) < out.value - tol ||
      col_guarantee(payoff, out.col_mix) > out.value + tol)
    throw SolverError("matrix game solution failed its security certificate");
  return out;
}

double row_guarantee(const Matrix& payoff, const std::vector<double>& row_mix) {
  double worst = kInf;
  for (std::size_t j = 0; j < payoff.cols(); ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < payoff.rows(); ++i) v += row_mix[i] * payoff(i, j);
    worst = std::min(worst, v);
  }
  return worst;
}

double col_guarantee(const Matrix& payoff, const std::vector<double>& col_mix) {
  double worst = -kInf;
  for (std::size_t i = 0; i < payoff.rows(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < payoff.cols(); ++j) v += payoff(i, j) * col_mix[j];
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace jamgame
