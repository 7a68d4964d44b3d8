#include "peakbound/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "peakbound/linalg.hpp"

namespace peakbound {
namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-11;
constexpr int kMaxPivots = 200000;
constexpr int kDegenerateLimit = 50;

struct Tableau {
  std::size_t m = 0;      // constraint rows
  std::size_t ncols = 0;  // structural + slack + artificial columns
  std::vector<double> t;  // (m + 1) x (ncols + 1); last row = reduced costs, last col = rhs
  std::vector<std::size_t> basis;
  int pivots = 0;

  double& at(std::size_t r, std::size_t c) { return t[r * (ncols + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t[r * (ncols + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, ncols); }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t w = ncols + 1;
    const double p = at(pr, pc);
    for (std::size_t c = 0; c < w; ++c) at(pr, c) /= p;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis[pr] = pc;
    ++pivots;
  }

  void load_costs(const std::vector<double>& cost) {
    for (std::size_t c = 0; c <= ncols; ++c) {
      double r = c < ncols ? cost[c] : 0.0;
      for (std::size_t i = 0; i < m; ++i) r -= cost[basis[i]] * at(i, c);
      at(m, c) = r;
    }
  }

  // Maximizes the loaded costs over allowed columns. Returns false when
  // unbounded. Dantzig pricing, and among minimum-ratio rows the largest
  // pivot; after a run of degenerate pivots it switches to Bland's rule,
  // which cannot cycle.
  bool run(const std::vector<bool>& allowed) {
    int degenerate_run = 0;
    while (true) {
      if (pivots > kMaxPivots) throw std::runtime_error("lp_solve: pivot limit exceeded");
      const bool bland = degenerate_run > kDegenerateLimit;
      std::size_t enter = ncols;
      double best_cost = kCostEps;
      for (std::size_t c = 0; c < ncols; ++c) {
        if (!allowed[c] || at(m, c) <= kCostEps) continue;
        if (bland) {
          enter = c;
          break;
        }
        if (at(m, c) > best_cost) {
          best_cost = at(m, c);
          enter = c;
        }
      }
      if (enter == ncols) return true;

      double col_scale = 0.0;
      for (std::size_t r = 0; r < m; ++r) col_scale = std::max(col_scale, std::abs(at(r, enter)));
      const double pivot_eps = kPivotEps * std::max(1.0, col_scale);
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m; ++r) {
        const double a = at(r, enter);
        if (a <= pivot_eps) continue;
        const double ratio = std::max(at(r, ncols), 0.0) / a;
        if (leave == m) {
          best = ratio;
          leave = r;
          continue;
        }
        const double tie = 1e-12 * std::max(1.0, best);
        if (ratio < best - tie) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + tie) {
          const bool better = bland ? basis[r] < basis[leave] : a > at(leave, enter);
          if (better) {
            best = std::min(best, ratio);
            leave = r;
          }
        }
      }
      if (leave == m) return false;
      degenerate_run = best <= 0.0 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
  }
};

void check_block(const LinearConstraints& block, std::size_t n, const char* what) {
  if (block.rows.size() != block.rhs.size())
    throw InputError(std::string("lp_solve: ") + what + " row count differs from rhs length");
  for (const auto& row : block.rows)
    if (row.size() != n) throw InputError(std::string("lp_solve: ") + what + " row has wrong column count");
}

}  // namespace

LPResult lp_solve(const LPProblem& problem) {
  const std::size_t n = problem.objective.size();
  if (n == 0) throw InputError("lp_solve: no variables");
  check_block(problem.equalities, n, "equality");
  check_block(problem.inequalities, n, "inequality");
  std::vector<double> lower(n, 0.0);
  if (problem.lower_bounds) {
    if (problem.lower_bounds->size() != n) throw InputError("lp_solve: lower bound length mismatch");
    lower = *problem.lower_bounds;
    for (double l : lower)
      if (std::isnan(l) || l == std::numeric_limits<double>::infinity())
        throw InputError("lp_solve: invalid lower bound");
  }

  // Column map: x_j = lower_j + y_a, or x_j = y_a - y_b when free.
  std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
  std::size_t nstruct = 0;
  for (std::size_t j = 0; j < n; ++j) {
    pos_col[j] = nstruct++;
    if (std::isinf(lower[j])) neg_col[j] = nstruct++;
  }

  const std::size_t n_ineq = problem.inequalities.rows.size();
  const std::size_t n_eq = problem.equalities.rows.size();
  const std::size_t m = n_ineq + n_eq;

  struct Row {
    std::vector<double> coef;  // over structural columns
    double rhs;
    double slack_sign;  // 0 when no slack
  };
  std::vector<Row> rows;
  rows.reserve(m);
  auto shift = [&](const std::vector<double>& a, double b) {
    Row row{std::vector<double>(nstruct, 0.0), b, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      row.coef[pos_col[j]] = a[j];
      if (neg_col[j] != SIZE_MAX) row.coef[neg_col[j]] = -a[j];
      else row.rhs -= a[j] * lower[j];
    }
    return row;
  };
  for (std::size_t i = 0; i < n_ineq; ++i) {
    Row r = shift(problem.inequalities.rows[i], problem.inequalities.rhs[i]);
    r.slack_sign = 1.0;
    rows.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n_eq; ++i) rows.push_back(shift(problem.equalities.rows[i], problem.equalities.rhs[i]));
  for (Row& r : rows)
    if (r.rhs < 0.0) {
      for (double& c : r.coef) c = -c;
      r.rhs = -r.rhs;
      r.slack_sign = -r.slack_sign;
    }

  std::size_t nartificial = 0;
  for (const Row& r : rows)
    if (r.slack_sign != 1.0) ++nartificial;

  Tableau tab;
  tab.m = m;
  tab.ncols = nstruct + n_ineq + nartificial;
  tab.t.assign((m + 1) * (tab.ncols + 1), 0.0);
  tab.basis.assign(m, 0);
  std::vector<bool> is_artificial(tab.ncols, false);
  std::size_t next_art = nstruct + n_ineq;
  double rhs_scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Row& r = rows[i];
    for (std::size_t c = 0; c < nstruct; ++c) tab.at(i, c) = r.coef[c];
    tab.rhs(i) = r.rhs;
    rhs_scale = std::max(rhs_scale, std::abs(r.rhs));
    if (i < n_ineq) tab.at(i, nstruct + i) = r.slack_sign;
    if (r.slack_sign == 1.0) {
      tab.basis[i] = nstruct + i;
    } else {
      tab.at(i, next_art) = 1.0;
      is_artificial[next_art] = true;
      tab.basis[i] = next_art++;
    }
  }

  LPResult result;
  const double feas_tol = kLPFeasibilityTol * rhs_scale;

  if (nartificial > 0) {
    std::vector<double> cost(tab.ncols, 0.0);
    for (std::size_t c = 0; c < tab.ncols; ++c)
      if (is_artificial[c]) cost[c] = -1.0;
    tab.load_costs(cost);
    std::vector<bool> allowed(tab.ncols, true);
    tab.run(allowed);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (is_artificial[tab.basis[i]]) infeasibility += tab.rhs(i);
    if (infeasibility > feas_tol) {
      result.status = LPStatus::infeasible;
      result.pivots = tab.pivots;
      return result;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[tab.basis[i]]) continue;
      std::size_t best = tab.ncols;
      double best_abs = 1e-9;
      for (std::size_t c = 0; c < tab.ncols; ++c) {
        if (is_artificial[c]) continue;
        if (std::abs(tab.at(i, c)) > best_abs) {
          best_abs = std::abs(tab.at(i, c));
          best = c;
        }
      }
      if (best != tab.ncols) tab.pivot(i, best);
    }
  }

  std::vector<double> cost(tab.ncols, 0.0);
  const double sign = problem.sense == LPSense::maximize ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    cost[pos_col[j]] = sign * problem.objective[j];
    if (neg_col[j] != SIZE_MAX) cost[neg_col[j]] = -sign * problem.objective[j];
  }
  tab.load_costs(cost);
  std::vector<bool> allowed(tab.ncols, true);
  for (std::size_t c = 0; c < tab.ncols; ++c) allowed[c] = !is_artificial[c];
  const bool bounded = tab.run(allowed);
  result.pivots = tab.pivots;
  if (!bounded) {
    result.status = LPStatus::unbounded;
    return result;
  }

  std::vector<double> y(tab.ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[tab.basis[i]] = std::max(tab.rhs(i), 0.0);
  result.solution.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    result.solution[j] = neg_col[j] != SIZE_MAX ? y[pos_col[j]] - y[neg_col[j]] : lower[j] + y[pos_col[j]];
  }
  result.optimum = 0.0;
  for (std::size_t j = 0; j < n; ++j) result.optimum += problem.objective[j] * result.solution[j];
  result.status = LPStatus::optimal;
  return result;
}

}  // namespace peakbound
