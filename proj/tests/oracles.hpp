#pragma once

// Reference computations that share no code with the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "jamgame/game_model.hpp"
#include "jamgame/matrix.hpp"

namespace jamgame::oracle {

// Gaussian elimination with partial pivoting; false if singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                         std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

// Calls visit on every k-subset of {0..n-1}.
inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// max_x min_b x^T A e_b by enumerating the vertices of
// {(x, v): x >= 0, sum x = 1, v <= (A^T x)_b}.
inline double maximin_by_vertices(const Matrix& a, std::vector<double>* best_x = nullptr) {
  const std::size_t m = a.rows(), n = a.cols();
  // Inequalities: x_i >= 0 (i < m), then v - (A^T x)_b <= 0.
  double best = -std::numeric_limits<double>::infinity();
  for_each_subset(m + n, m, [&](const std::vector<std::size_t>& active) {
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    rows.push_back(std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) rows.back()[i] = 1.0;
    rhs.push_back(1.0);
    for (std::size_t c : active) {
      std::vector<double> r(m + 1, 0.0);
      if (c < m) {
        r[c] = 1.0;
      } else {
        for (std::size_t i = 0; i < m; ++i) r[i] = -a(i, c - m);
        r[m] = 1.0;
      }
      rows.push_back(r);
      rhs.push_back(0.0);
    }
    std::vector<double> z;
    if (!solve_linear(rows, rhs, z)) return;
    for (std::size_t i = 0; i < m; ++i)
      if (z[i] < -1e-9) return;
    for (std::size_t b = 0; b < n; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += z[i] * a(i, b);
      if (z[m] > s + 1e-9) return;
    }
    if (z[m] > best) {
      best = z[m];
      if (best_x != nullptr) best_x->assign(z.begin(), z.begin() + static_cast<long>(m));
    }
  });
  return best;
}

// min_y max_a e_a^T A y, through the maximin of -A^T.
inline double minimax_by_vertices(const Matrix& a) {
  Matrix neg(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) neg(j, i) = -a(i, j);
  return -maximin_by_vertices(neg);
}

// Normal form of the one-shot game with one-sided information: the jammer's
// pure strategies are maps state -> action (row index in mixed radix, state 0
// most significant); entry = sum_theta p^theta U^theta(a_theta, b).
inline Matrix one_shot_normal_form(const GameSpec& g, const BeliefState& p) {
  const std::size_t ns = g.num_states(), nj = g.num_jammer_actions(), n0 = g.num_enb_actions();
  std::size_t rows = 1;
  for (std::size_t s = 0; s < ns; ++s) rows *= nj;
  Matrix out(rows, n0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t code = r;
    std::vector<std::size_t> act(ns);
    for (std::size_t s = ns; s-- > 0;) {
      act[s] = code % nj;
      code /= nj;
    }
    for (std::size_t b = 0; b < n0; ++b) {
      double v = 0.0;
      for (std::size_t s = 0; s < ns; ++s) v += p[s] * g.payoff[s](act[s], b);
      out(r, b) = v;
    }
  }
  return out;
}

// Worst-case discounted payoff per state against an eNodeB behavior
// strategy, by walking every pure jammer path of length `stages`.
// policy(history) gives the eNodeB's mix after `history`.
inline std::vector<double> path_levels_brute(
    const GameSpec& g, int stages,
    const std::function<std::vector<double>(const std::vector<std::size_t>&)>& policy) {
  const std::size_t nj = g.num_jammer_actions();
  std::vector<double> worst(g.num_states(), -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> path;
  std::function<void(std::vector<double>, double)> walk = [&](std::vector<double> acc, double w) {
    if (static_cast<int>(path.size()) == stages) {
      for (std::size_t s = 0; s < acc.size(); ++s) worst[s] = std::max(worst[s], acc[s]);
      return;
    }
    const std::vector<double> y = policy(path);
    for (std::size_t a = 0; a < nj; ++a) {
      std::vector<double> next = acc;
      for (std::size_t s = 0; s < g.num_states(); ++s) {
        double u = 0.0;
        for (std::size_t b = 0; b < y.size(); ++b) u += g.payoff[s](a, b) * y[b];
        next[s] += w * u;
      }
      path.push_back(a);
      walk(next, w * (1.0 - g.discount));
      path.pop_back();
    }
  };
  walk(std::vector<double>(g.num_states(), 0.0), g.discount);
  return worst;
}

}  // namespace jamgame::oracle
