#pragma once

// Constructive instability. An expanding seed (R, x*) with
// μ = ‖Rx*‖·σ/‖x*‖ > 1 guarantees, for every x, some L ∈ F_p with
// ‖R L x‖ ≥ μ‖x‖. Chaining such blocks gives a switching schedule along
// which the state grows geometrically.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peakbound/linalg.hpp"
#include "peakbound/qc.hpp"
#include "peakbound/semigroup.hpp"

namespace peakbound {

/// An expansion step fell short of μ, so the σ lower bound behind μ is wrong.
class CertificateViolation : public std::runtime_error {
 public:
  CertificateViolation(const std::string& what, Vector x, double ratio, double mu)
      : std::runtime_error(what), x(std::move(x)), ratio(ratio), mu(mu) {}
  Vector x;
  double ratio;
  double mu;
};

struct ExpandingSeed {
  ProductWord word;
  Matrix product;
  Vector x;
  double mu = 0.0;
};

/// Best (largest μ) seed over products of length 1..depth and candidate
/// vectors: the l1 sphere grid plus each product's maximizing direction.
/// nullopt unless μ > 1.
std::optional<ExpandingSeed> find_expanding_seed(const MatrixFamily& family, double sigma_lower, std::size_t depth,
                                                 NormKind norm = NormKind::l1, std::size_t grid_resolution = 4,
                                                 std::size_t cap = default_product_cap(), std::size_t threads = 1);

struct ExpansionStep {
  /// The chosen L ∈ F_p; the block applies L first, then R.
  ProductWord chosen;
  /// ‖R L x‖/‖x‖.
  double growth_ratio = 0.0;
  Vector next;
};

/// argmax over L ∈ F_p of ‖R L x‖/‖x‖ (first maximizer in item order).
/// Throws CertificateViolation when the best ratio is below μ.
ExpansionStep expansion_step(const ProductSet& fp, const Matrix& r, const Vector& x, double mu, NormKind norm);

struct InstabilityWitness {
  /// Member indices in application order, one per time step.
  std::vector<std::size_t> schedule;
  double kappa = 0.0;
  double lambda = 0.0;
  std::vector<Vector> trajectory;
  std::size_t horizon = 0;
  /// Times at which a block ends; consecutive gaps are at most block_bound.
  std::vector<std::size_t> checkpoints;
  std::size_t block_bound = 0;
  ExpandingSeed seed;
  double sigma_lower = 0.0;
  std::size_t p = 0;
  NormKind norm = NormKind::l1;
};

struct WitnessOutcome {
  std::optional<InstabilityWitness> witness;
  std::string diagnostic;
  std::optional<QCReport> qc;
};

/// Witness for x0 over `horizon` steps, verified by replay before it is
/// returned. λ and κ are the sharpest pair supported by the recorded norms.
WitnessOutcome build_witness(const MatrixFamily& family, std::size_t p, const Vector& x0, std::size_t horizon,
                             const QCParams& params = {}, std::size_t seed_depth = 6);

/// Independent check from the schedule and x(0) alone: recomputes the
/// trajectory, checks ‖x(n)‖ ≥ κλⁿ‖x(0)‖ at every n ≤ horizon with relative
/// slack, and checks the checkpoint gaps.
bool replay_verify(const MatrixFamily& family, const InstabilityWitness& witness, double slack = 1e-9);

struct RobustnessRow {
  double tau = 0.0;
  Verdict verdict = Verdict::undetermined;
  std::optional<double> sigma_lower;
  bool witness_found = false;
  std::optional<double> lambda;
  std::optional<double> kappa;
  std::string diagnostic;
};

/// Witness search at each τ, starting from e_1.
std::vector<RobustnessRow> robustness_scan(const FamilySource& family_at, const std::vector<double>& taus,
                                           const QCParams& params = {}, std::size_t horizon = 100,
                                           std::size_t seed_depth = 6);

}  // namespace peakbound
