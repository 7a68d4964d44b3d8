#pragma once

// Dense two-phase simplex for the tiny membership LPs of the geometry module.
// Dantzig pricing, falling back to Bland's rule after a run of degenerate
// pivots so it cannot cycle. The pivot sequence depends only on the input.

#include <optional>
#include <vector>

namespace peakbound {

struct LinearConstraints {
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
};

enum class LPSense { maximize, minimize };
enum class LPStatus { optimal, infeasible, unbounded };

/// Equalities: rows·x = rhs. Inequalities: rows·x ≤ rhs.
/// `lower_bounds` absent means x ≥ 0; an entry of -infinity makes that
/// variable free.
struct LPProblem {
  std::vector<double> objective;
  LPSense sense = LPSense::maximize;
  LinearConstraints equalities;
  LinearConstraints inequalities;
  std::optional<std::vector<double>> lower_bounds;
};

struct LPResult {
  LPStatus status = LPStatus::infeasible;
  double optimum = 0.0;
  std::vector<double> solution;
  int pivots = 0;
};

inline constexpr double kLPFeasibilityTol = 1e-9;

/// Throws InputError on dimension mismatch.
LPResult lp_solve(const LPProblem& problem);

}  // namespace peakbound
