#pragma once

// Ball containment in absolute convex hulls absco(V) = co(V ∪ −V).

#include <cstddef>
#include <string>
#include <vector>

#include "peakbound/linalg.hpp"

namespace peakbound {

class SymmetricPolytope {
 public:
  explicit SymmetricPolytope(std::vector<Vector> generators);

  const std::vector<Vector>& generators() const { return generators_; }
  std::size_t dim() const { return generators_.front().dim(); }

 private:
  std::vector<Vector> generators_;
};

struct BallContainment {
  /// Certified: S(radius) ⊆ absco(V).
  double radius = 0.0;
  /// Smallest directional radius actually evaluated; equals `radius` for the
  /// polytope norms, an upper bound on the true inscribed radius for l2.
  double upper = 0.0;
  Vector tight_direction;
  std::string method;
};

struct GeometryOptions {
  /// linf enumerates 2^(N-1) sign vertices; larger N is rejected.
  std::size_t linf_max_dim = 10;
  /// l2 direction net: directions on the half circle when N = 2.
  std::size_t l2_circle_directions = 64;
  /// l2 direction net for N ≥ 3: grid intervals per cube-face edge.
  std::size_t l2_face_resolution = 8;
};

/// max{t ≥ 0 : t·d ∈ absco(V)}; 0 when d is outside span(V).
double directional_radius(const SymmetricPolytope& polytope, const Vector& direction);

/// Largest `norm` ball centred at 0 inside absco(V). Exact for l1 (ball
/// vertices ±e_j) and linf (sign vertices); for l2 a certified lower bound
/// from a direction net with its covering correction.
BallContainment inscribed_radius(const SymmetricPolytope& polytope, NormKind norm, const GeometryOptions& options = {});

}  // namespace peakbound
