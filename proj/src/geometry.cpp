#include "peakbound/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "peakbound/lp.hpp"

namespace peakbound {

SymmetricPolytope::SymmetricPolytope(std::vector<Vector> generators) : generators_(std::move(generators)) {
  if (generators_.empty()) throw InputError("symmetric polytope needs at least one generator");
  const std::size_t n = generators_.front().dim();
  if (n == 0) throw InputError("symmetric polytope generators must have dim >= 1");
  for (const Vector& g : generators_) {
    if (g.dim() != n) throw InputError("symmetric polytope generators differ in dimension");
    if (!g.all_finite()) throw InputError("symmetric polytope generator is not finite");
  }
}

double directional_radius(const SymmetricPolytope& polytope, const Vector& direction) {
  const std::size_t n = polytope.dim();
  if (direction.dim() != n) throw InputError("directional_radius: direction dimension mismatch");
  if (direction.is_zero()) throw InputError("directional_radius: zero direction");

  std::vector<const Vector*> gens;
  for (const Vector& g : polytope.generators())
    if (!g.is_zero()) gens.push_back(&g);
  if (gens.empty()) return 0.0;

  // Dual form: t·d ∈ absco(V) iff t·(dᵀy) ≤ 1 whenever |vᵀy| ≤ 1 for all
  // v ∈ V, so the radius is 1/max{dᵀy : |vᵀy| ≤ 1}. The slack basis is
  // feasible from the start, which keeps the solve well conditioned even
  // with many nearly parallel generators.
  LPProblem lp;
  lp.objective = direction.raw();
  lp.lower_bounds = std::vector<double>(n, -std::numeric_limits<double>::infinity());
  for (const Vector* g : gens) {
    lp.inequalities.rows.push_back(g->raw());
    lp.inequalities.rhs.push_back(1.0);
    lp.inequalities.rows.push_back((-*g).raw());
    lp.inequalities.rhs.push_back(1.0);
  }
  const LPResult res = lp_solve(lp);
  // Unbounded: d leaves span(V), so no positive multiple fits.
  if (res.status != LPStatus::optimal || !(res.optimum > 0.0)) return 0.0;
  return 1.0 / res.optimum;
}

namespace {

struct DirectionalMin {
  double value = std::numeric_limits<double>::infinity();
  Vector direction;

  void offer(double v, const Vector& d) {
    if (v < value) {
      value = v;
      direction = d;
    }
  }
};

}  // namespace

BallContainment inscribed_radius(const SymmetricPolytope& polytope, NormKind norm, const GeometryOptions& options) {
  const std::size_t n = polytope.dim();
  DirectionalMin best;
  BallContainment out;

  switch (norm) {
    case NormKind::l1: {
      for (std::size_t j = 0; j < n && best.value > 0.0; ++j) {
        const Vector e = Vector::basis(n, j);
        best.offer(directional_radius(polytope, e), e);
      }
      out.radius = out.upper = best.value;
      out.method = "exact: l1 ball vertices";
      break;
    }
    case NormKind::linf: {
      if (n > options.linf_max_dim)
        throw InputError("inscribed_radius: linf needs 2^(N-1) LPs; N = " + std::to_string(n) +
                         " exceeds the cap of " + std::to_string(options.linf_max_dim) + ", use l1");
      const std::size_t count = std::size_t{1} << (n - 1);
      for (std::size_t mask = 0; mask < count && best.value > 0.0; ++mask) {
        Vector s(n, 1.0);
        for (std::size_t j = 1; j < n; ++j)
          if (mask & (std::size_t{1} << (j - 1))) s[j] = -1.0;
        best.offer(directional_radius(polytope, s), s);
      }
      out.radius = out.upper = best.value;
      out.method = "exact: linf ball vertices";
      break;
    }
    case NormKind::l2: {
      double cos_cover = 1.0;
      if (n == 1) {
        best.offer(directional_radius(polytope, Vector{1.0}), Vector{1.0});
        out.method = "exact: l2 ball vertices";
      } else if (n == 2) {
        const std::size_t k = std::max<std::size_t>(options.l2_circle_directions, 2);
        for (std::size_t i = 0; i < k && best.value > 0.0; ++i) {
          const double a = std::numbers::pi * double(i) / double(k);
          const Vector d{std::cos(a), std::sin(a)};
          best.offer(directional_radius(polytope, d), d);
        }
        cos_cover = std::cos(std::numbers::pi / (2.0 * double(k)));
        out.method = "lower bound: l2 circle net";
      } else {
        const std::size_t g = std::max<std::size_t>(options.l2_face_resolution, 1);
        std::vector<std::size_t> idx(n - 1, 0);
        for (std::size_t axis = 0; axis < n && best.value > 0.0; ++axis) {
          std::fill(idx.begin(), idx.end(), 0);
          while (best.value > 0.0) {
            Vector d(n);
            d[axis] = 1.0;
            for (std::size_t j = 0, k = 0; j < n; ++j)
              if (j != axis) d[j] = -1.0 + 2.0 * double(idx[k++]) / double(g);
            d *= 1.0 / vector_norm(d, NormKind::l2);
            best.offer(directional_radius(polytope, d), d);
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] > g) idx[k++] = 0;
            if (k == idx.size()) break;
          }
        }
        const double chord = std::min(2.0, 2.0 * std::sqrt(double(n - 1)) / double(g));
        cos_cover = 1.0 - chord * chord / 2.0;
        out.method = "lower bound: l2 cube-face net";
      }
      out.upper = best.value;
      out.radius = std::max(0.0, best.value * cos_cover);
      break;
    }
  }
  out.tight_direction = best.direction;
  return out;
}

}  // namespace peakbound
