#pragma once

// Finite-product stability certificates, bounds on the overshooting measure
// χ(F) = sup over products of the induced norm, and the circle-criterion
// feedback family.

#include <cstddef>
#include <optional>
#include <string>

#include "peakbound/linalg.hpp"
#include "peakbound/qc.hpp"
#include "peakbound/semigroup.hpp"

namespace peakbound {

/// Every length-k product has induced norm ≤ q ≤ 1, and every shorter
/// product (identity included) has norm ≤ mu. Together these bound every
/// product by mu, so the switched system is Lyapunov absolutely stable with
/// χ ≤ mu. `asymptotic` is q < 1.
struct StabilityCertificate {
  std::size_t k = 0;
  double q = 0.0;
  double mu = 1.0;
  NormKind norm = NormKind::l1;
  bool asymptotic = false;
};

/// Smallest k ≤ kmax admitting a certificate. The requested norm is tried
/// first, then the other two; nullopt means "unknown", never "unstable".
std::optional<StabilityCertificate> stability_certificate(const MatrixFamily& family, std::size_t kmax,
                                                          NormKind norm = NormKind::l1,
                                                          std::size_t cap = default_product_cap());

struct ChiLowerResult {
  double bound = 1.0;
  ProductWord word;
  std::size_t nodes = 0;
};

/// Max induced norm over all products of length ≤ depth (identity included),
/// by depth-first branch and bound. A node is expanded only if its norm times
/// a rigorous bound on the growth of any suffix can beat the incumbent.
/// Throws CapExceeded after `node_cap` visited nodes.
ChiLowerResult chi_lower(const MatrixFamily& family, std::size_t depth, NormKind norm = NormKind::l1,
                         std::size_t node_cap = 50'000'000);

struct ChiUpper {
  std::optional<double> value;
  std::string reason;
  std::optional<StabilityCertificate> certificate;
  std::optional<QCReport> qc;
};

/// 1/σ_lower when the family is certified stable and certified
/// quasi-controllable; otherwise nullopt with the failed hypothesis.
ChiUpper chi_upper(const MatrixFamily& family, const QCParams& params = {}, std::size_t kmax = 8);

enum class StabilityVerdict { certified_stable, certified_unstable, unknown };
std::string to_string(StabilityVerdict v);

struct PeakReport {
  double chi_lower = 1.0;
  ProductWord chi_lower_word;
  std::size_t depth = 0;
  std::size_t nodes = 0;
  std::optional<double> chi_upper;
  std::string upper_reason;
  StabilityVerdict verdict = StabilityVerdict::unknown;
  std::optional<StabilityCertificate> certificate;
  std::optional<QCReport> qc;
  /// Where the upper bound came from, empty when absent.
  std::string provenance;
};

/// chi_lower plus chi_upper. The verdict is never "certified unstable" here;
/// callers holding a verified instability witness set it themselves.
PeakReport peak_report(const MatrixFamily& family, std::size_t depth, const QCParams& params = {},
                       std::size_t kmax = 8);

struct CircleFeedback {
  /// {A − γbcᵀ, A + γbcᵀ} without duplicates.
  MatrixFamily family;
  /// max over |ω| = 1 of |cᵀ(ωI − A)⁻¹b|; infinite when ωI − A is singular
  /// at a sample.
  double max_gain = 0.0;
  double worst_angle = 0.0;
  /// |γ|·max_gain < 1.
  bool holds = false;
  double margin = 0.0;
  std::string diagnostic;
};

CircleFeedback circle_feedback_family(const Matrix& a, const Vector& b, const Vector& c, double gamma,
                                      std::size_t samples = 4096);

}  // namespace peakbound
