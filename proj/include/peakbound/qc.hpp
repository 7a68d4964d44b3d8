#pragma once

// Quasi-controllability analysis: span tests, the p-measure σ_p(F) with a
// certified lower bound, invariant-subspace certificates for the negative
// case, and continuity scans over parameterized families.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "peakbound/geometry.hpp"
#include "peakbound/linalg.hpp"
#include "peakbound/semigroup.hpp"

namespace peakbound {

enum class Verdict { yes, no, undetermined };
std::string to_string(Verdict v);

struct QCParams {
  /// Product depth; defaults to N − 1.
  std::optional<std::size_t> p;
  NormKind norm = NormKind::l1;
  std::size_t multistart = 8;
  /// Grid intervals per edge of each l1-sphere orthant face.
  std::size_t grid_resolution = 8;
  double rank_tol = 1e-9;
  std::uint64_t seed = 1;
  /// Allows p < N − 1; such reports are flagged.
  bool exploratory = false;
  /// "yes" needs a certified lower bound above this.
  double yes_threshold = 1e-7;
  bool certify = true;
  std::size_t certify_max_dim = 4;
  /// Maximum number of branch-and-bound cells in the certification.
  std::size_t certify_budget = 200000;
  /// Certification aims for this fraction of the best upper estimate.
  double certify_target_fraction = 0.5;
  double dedup_tol = kDefaultDedupTol;
  std::size_t product_cap = default_product_cap();
  std::size_t threads = 1;
  GeometryOptions geometry;

  std::size_t resolve_p(std::size_t n) const { return p.value_or(n == 0 ? 0 : n - 1); }
};

struct SpanResult {
  bool full = false;
  std::size_t dimension = 0;
};

struct QCReport {
  Verdict verdict = Verdict::undetermined;
  std::size_t p = 0;
  NormKind norm = NormKind::l1;
  bool exploratory = false;
  /// Smallest radius seen over all evaluated unit vectors (an upper bound on
  /// σ_p up to the l2 net gap).
  double sigma_upper = 0.0;
  /// Certified: σ_p(F) ≥ sigma_lower.
  std::optional<double> sigma_lower;
  /// Minimum over the deterministic grid only; identical grids give
  /// comparable values across families.
  double grid_minimum = 0.0;
  Vector worst_x;
  std::optional<std::vector<Vector>> certificate;
  /// max over F_p of the induced norm.
  double lipschitz = 0.0;
  std::size_t evaluations = 0;
  std::size_t cells = 0;
  /// Set when the algebraic irreducibility test ran.
  std::optional<std::size_t> algebra_dimension;
  std::string notes;
};

/// Points of the l1 unit sphere with coordinates in (1/g)ℤ, one of each ±x
/// pair (first nonzero coordinate positive).
std::vector<Vector> sphere_grid(std::size_t n, std::size_t g);

/// Dimension of the real algebra spanned by all products of members
/// (identity included). N² means no common invariant subspace.
std::size_t algebra_dimension(const MatrixFamily& family, double tol = 1e-9);

SpanResult span_test(const MatrixFamily& family, std::size_t p, const Vector& x, double tol = 1e-9);

/// Inscribed-ball radius of absco(F_p(x/‖x‖)). For l2 this is the certified
/// lower bound of the direction net.
double radius_at(const MatrixFamily& family, std::size_t p, const Vector& x, NormKind norm,
                 const GeometryOptions& geometry = {});
double radius_at(const ProductSet& products, const Vector& x, NormKind norm, const GeometryOptions& geometry = {});

QCReport sigma_estimate(const MatrixFamily& family, const QCParams& params = {});

/// Orthonormal basis of span{F_N(x)} if it is a proper subspace invariant
/// under every member within tol; nullopt otherwise.
std::optional<std::vector<Vector>> invariant_subspace_certificate(const MatrixFamily& family, const Vector& x,
                                                                  std::size_t p, double tol = 1e-9);

/// Independent check: nonzero proper subspace, and every member maps each
/// basis vector into the span within tol (relative to the member's l2 norm).
bool verify_invariant_subspace(const MatrixFamily& family, const std::vector<Vector>& basis, double tol = 1e-9);

using FamilySource = std::function<MatrixFamily(double)>;

struct ContinuityRow {
  double tau = 0.0;
  double sigma_grid = 0.0;
  double sigma_upper = 0.0;
  std::optional<double> sigma_lower;
  Verdict verdict = Verdict::undetermined;
};

struct ContinuityScan {
  /// Row for τ = 0.
  ContinuityRow base;
  std::vector<ContinuityRow> rows;
  /// min over the scan of certified lower bounds, when all are positive.
  std::optional<double> uniform_lower;
  bool base_quasi_controllable = false;
};

ContinuityScan continuity_scan(const FamilySource& family_at, const std::vector<double>& taus,
                               const QCParams& params = {});

}  // namespace peakbound
