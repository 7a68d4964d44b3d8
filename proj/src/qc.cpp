#include "peakbound/qc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "peakbound/parallel.hpp"

namespace peakbound {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

struct PointValue {
  double raw = 0.0;        // certified inscribed radius of absco(F_p(y))
  double raw_upper = 0.0;  // smallest evaluated directional radius
  double scale = 1.0;      // ‖y‖

  double value() const { return raw / scale; }
  double upper() const { return raw_upper / scale; }
};

class RadiusEvaluator {
 public:
  RadiusEvaluator(const ProductSet& products, NormKind norm, const GeometryOptions& geometry)
      : products_(products), norm_(norm), geometry_(geometry) {}

  PointValue operator()(const Vector& y) const {
    const BallContainment bc = inscribed_radius(SymmetricPolytope(orbit(products_, y)), norm_, geometry_);
    return {bc.radius, bc.upper, vector_norm(y, norm_)};
  }

  NormKind norm() const { return norm_; }
  const ProductSet& products() const { return products_; }

 private:
  const ProductSet& products_;
  NormKind norm_;
  GeometryOptions geometry_;
};

Vector normalized(const Vector& x, NormKind norm) { return x * (1.0 / vector_norm(x, norm)); }

// Vectors that must include a member of every common invariant subspace when
// the corresponding matrix has simple spectrum: real eigenvectors and the
// real/imaginary parts of complex eigenvectors.
std::vector<Vector> invariant_candidates(const MatrixFamily& family, std::uint64_t seed) {
  const std::size_t n = family.dim();
  std::vector<Matrix> sources = family.members();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  if (family.size() > 1)
    for (int r = 0; r < 2; ++r) {
      Matrix combo(n, n);
      for (const Matrix& m : family.members()) combo += m * coef(rng);
      sources.push_back(std::move(combo));
    }

  std::vector<Vector> out;
  for (const Matrix& m : sources) {
    Eigen::MatrixXd em(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) em(Eigen::Index(r), Eigen::Index(c)) = m(r, c);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(em, true);
    if (solver.info() != Eigen::Success) continue;
    const auto vecs = solver.eigenvectors();
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
      Vector re(n), im(n);
      for (std::size_t r = 0; r < n; ++r) {
        re[r] = vecs(Eigen::Index(r), k).real();
        im[r] = vecs(Eigen::Index(r), k).imag();
      }
      if (vector_norm(re, NormKind::l2) > 1e-8) out.push_back(re);
      if (vector_norm(im, NormKind::l2) > 1e-8) out.push_back(im);
    }
  }
  for (std::size_t j = 0; j < n; ++j) out.push_back(Vector::basis(n, j));
  return out;
}

SpanResult span_of(const ProductSet& products, const Vector& x, double tol) {
  const auto vs = orbit(products, x);
  const std::size_t d = rank(vs, tol);
  return {d == products.dim(), d};
}

// Pattern search over coordinate moves, renormalized onto the unit sphere.
std::pair<double, Vector> local_descent(const RadiusEvaluator& eval, Vector x, double step, std::size_t max_evals,
                                        std::size_t& evals) {
  const NormKind norm = eval.norm();
  x = normalized(x, norm);
  double fx = eval(x).upper();
  ++evals;
  std::size_t used = 1;
  const std::size_t n = x.dim();
  while (step > 1e-5 && used < max_evals) {
    bool improved = false;
    for (std::size_t j = 0; j < n && !improved && used < max_evals; ++j)
      for (double sgn : {1.0, -1.0}) {
        Vector y = x;
        y[j] += sgn * step;
        if (y.is_zero()) continue;
        y = normalized(y, norm);
        const double fy = eval(y).upper();
        ++evals;
        ++used;
        if (fy < fx) {
          fx = fy;
          x = std::move(y);
          improved = true;
          break;
        }
      }
    if (!improved) step *= 0.5;
  }
  return {fx, x};
}

struct Cell {
  std::vector<Vector> vertices;
};

struct CertifyOutcome {
  std::optional<double> lower;
  std::size_t cells = 0;
  std::size_t evaluations = 0;
  std::string note;
};

// Branch and bound over simplicial cells of the l1-sphere faces. For y in a
// cell with vertices v_j, every generator moves by at most
// D_k = max_j max_R ‖R(v_j − v_k)‖, which bounds the Hausdorff distance of
// the hulls, so r(y) ≥ (raw(v_k) − D_k) / max_j ‖v_j‖.
CertifyOutcome certify_lower_bound(const RadiusEvaluator& eval, const QCParams& params, double& upper,
                                   Vector& worst) {
  const ProductSet& fp = eval.products();
  const NormKind norm = eval.norm();
  const std::size_t n = fp.dim();
  CertifyOutcome out;

  std::vector<Cell> current;
  for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
    Cell c;
    for (std::size_t j = 0; j < n; ++j) {
      Vector v = Vector::basis(n, j);
      if (j > 0 && (mask & (std::size_t{1} << (j - 1)))) v[j] = -1.0;
      c.vertices.push_back(std::move(v));
    }
    current.push_back(std::move(c));
  }

  std::map<std::vector<double>, PointValue> cache;
  const double frac = params.certify_target_fraction;
  double target = frac * upper;
  double min_lb = std::numeric_limits<double>::infinity();
  const double safety = 1e-12 * std::max(1.0, fp.max_norm(norm));

  while (!current.empty()) {
    std::vector<Vector> missing;
    std::set<std::vector<double>> pending;
    for (const Cell& c : current)
      for (const Vector& v : c.vertices)
        if (!cache.count(v.raw()) && pending.insert(v.raw()).second) missing.push_back(v);
    std::vector<PointValue> values(missing.size());
    parallel_for(missing.size(), params.threads, [&](std::size_t i) { values[i] = eval(missing[i]); });
    out.evaluations += missing.size();
    for (std::size_t i = 0; i < missing.size(); ++i) cache.emplace(missing[i].raw(), values[i]);

    std::vector<Cell> next;
    for (Cell& cell : current) {
      if (++out.cells > params.certify_budget) {
        out.note = "certification budget of " + std::to_string(params.certify_budget) + " cells exhausted";
        return out;
      }
      double max_scale = 0.0;
      std::vector<const PointValue*> pv;
      for (const Vector& v : cell.vertices) {
        const PointValue& val = cache.at(v.raw());
        pv.push_back(&val);
        max_scale = std::max(max_scale, val.scale);
        if (val.upper() < upper) {
          upper = val.upper();
          worst = normalized(v, norm);
          target = std::min(target, frac * upper);
        }
      }
      if (target <= params.yes_threshold) {
        out.note = "radius values fall to " + std::to_string(upper) + "; cannot certify above the threshold";
        return out;
      }
      double lb = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < cell.vertices.size(); ++k) {
        double dk = 0.0;
        for (std::size_t j = 0; j < cell.vertices.size(); ++j) {
          if (j == k) continue;
          const Vector diff = cell.vertices[j] - cell.vertices[k];
          for (const ProductItem& item : fp.items()) dk = std::max(dk, vector_norm(item.matrix * diff, norm));
        }
        lb = std::max(lb, (pv[k]->raw - dk - safety) / max_scale);
      }
      if (lb >= target) {
        min_lb = std::min(min_lb, lb);
        continue;
      }
      // Longest-edge bisection.
      std::size_t a = 0, b = 0;
      double longest = -1.0;
      for (std::size_t i = 0; i < cell.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < cell.vertices.size(); ++j) {
          const double len = vector_norm(cell.vertices[i] - cell.vertices[j], NormKind::l1);
          if (len > longest) {
            longest = len;
            a = i;
            b = j;
          }
        }
      const Vector mid = (cell.vertices[a] + cell.vertices[b]) * 0.5;
      Cell left = cell, right = std::move(cell);
      left.vertices[a] = mid;
      right.vertices[b] = mid;
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    current = std::move(next);
  }
  out.lower = std::min(min_lb, upper);
  return out;
}

}  // namespace

std::vector<Vector> sphere_grid(std::size_t n, std::size_t g) {
  std::set<std::vector<long>> seen;
  std::vector<Vector> out;
  std::vector<long> parts(n, 0);
  std::function<void(std::size_t, long)> compose = [&](std::size_t j, long left) {
    if (j + 1 == n) {
      parts[j] = left;
      std::vector<std::size_t> nonzero;
      for (std::size_t i = 0; i < n; ++i)
        if (parts[i] != 0) nonzero.push_back(i);
      // First nonzero coordinate stays positive.
      const std::size_t free_signs = nonzero.size() - 1;
      for (std::size_t mask = 0; mask < (std::size_t{1} << free_signs); ++mask) {
        std::vector<long> key = parts;
        for (std::size_t b = 0; b < free_signs; ++b)
          if (mask & (std::size_t{1} << b)) key[nonzero[b + 1]] = -key[nonzero[b + 1]];
        if (!seen.insert(key).second) continue;
        Vector y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = double(key[i]) / double(g);
        out.push_back(std::move(y));
      }
      return;
    }
    for (long k = 0; k <= left; ++k) {
      parts[j] = k;
      compose(j + 1, left - k);
    }
  };
  compose(0, static_cast<long>(std::max<std::size_t>(g, 1)));
  return out;
}

std::size_t algebra_dimension(const MatrixFamily& family, double tol) {
  const std::size_t n = family.dim();
  const std::size_t full = n * n;
  auto flat = [](const Matrix& m) { return Vector(std::vector<double>(m.data().begin(), m.data().end())); };
  std::vector<Vector> basis;
  std::vector<Matrix> queue;
  // Adds m when it leaves the current span; returns whether it did.
  auto add = [&](const Matrix& m) {
    Vector v = flat(m);
    const double scale = vector_norm(v, NormKind::l2);
    if (scale == 0.0) return false;
    v *= 1.0 / scale;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& b : basis) v -= b * dot(b, v);
    const double residual = vector_norm(v, NormKind::l2);
    if (residual <= tol) return false;
    basis.push_back(v * (1.0 / residual));
    queue.push_back(m * (1.0 / scale));
    return true;
  };
  add(Matrix::identity(n));
  for (std::size_t head = 0; head < queue.size() && basis.size() < full; ++head)
    for (const Matrix& a : family.members()) {
      const Matrix next = a * queue[head];
      add(next);
      if (basis.size() == full) break;
    }
  return basis.size();
}

SpanResult span_test(const MatrixFamily& family, std::size_t p, const Vector& x, double tol) {
  if (x.dim() != family.dim()) throw InputError("span_test: vector dimension mismatch");
  if (x.is_zero()) throw InputError("span_test: x must be nonzero");
  return span_of(enumerate_products(family, p), x, tol);
}

double radius_at(const ProductSet& products, const Vector& x, NormKind norm, const GeometryOptions& geometry) {
  if (x.dim() != products.dim()) throw InputError("radius_at: vector dimension mismatch");
  if (x.is_zero()) throw InputError("radius_at: x must be nonzero");
  const Vector u = normalized(x, norm);
  return inscribed_radius(SymmetricPolytope(orbit(products, u)), norm, geometry).radius;
}

double radius_at(const MatrixFamily& family, std::size_t p, const Vector& x, NormKind norm,
                 const GeometryOptions& geometry) {
  return radius_at(enumerate_products(family, p), x, norm, geometry);
}

bool verify_invariant_subspace(const MatrixFamily& family, const std::vector<Vector>& basis, double tol) {
  if (basis.empty()) return false;
  const std::size_t n = family.dim();
  for (const Vector& b : basis)
    if (b.dim() != n) return false;
  const std::vector<Vector> q = orthonormal_basis(basis, tol);
  if (q.empty() || q.size() >= n) return false;
  for (const Matrix& m : family.members()) {
    const double scale = induced_norm(m, NormKind::l2);
    for (const Vector& v : q) {
      Vector w = m * v;
      for (const Vector& u : q) w -= u * dot(u, w);
      if (vector_norm(w, NormKind::l2) > tol * scale) return false;
    }
  }
  return true;
}

std::optional<std::vector<Vector>> invariant_subspace_certificate(const MatrixFamily& family, const Vector& x,
                                                                  std::size_t /*p*/, double tol) {
  if (x.dim() != family.dim() || x.is_zero()) return std::nullopt;
  const std::size_t n = family.dim();
  // The span of F_N(x) has stabilized, so it is the invariant candidate.
  const ProductSet fn = enumerate_products(family, n);
  std::vector<Vector> basis = orthonormal_basis(orbit(fn, x), tol);
  if (basis.empty() || basis.size() >= n) return std::nullopt;
  if (!verify_invariant_subspace(family, basis, tol)) return std::nullopt;
  return basis;
}

QCReport sigma_estimate(const MatrixFamily& family, const QCParams& params) {
  const std::size_t n = family.dim();
  const std::size_t p = params.resolve_p(n);
  if (p + 1 < n && !params.exploratory)
    throw InputError("sigma_estimate: p = " + std::to_string(p) + " < N - 1 = " + std::to_string(n - 1) +
                     " needs exploratory mode");
  QCReport report;
  report.p = p;
  report.norm = params.norm;
  report.exploratory = p + 1 < n;
  std::ostringstream notes;
  if (report.exploratory) notes << "exploratory: p < N-1, conclusions of the p >= N-1 theory do not apply; ";

  const ProductSet fp = enumerate_products(family, p, params.dedup_tol, params.product_cap);
  report.lipschitz = fp.max_norm(params.norm);
  const RadiusEvaluator eval(fp, params.norm, params.geometry);

  auto negative = [&](const Vector& x) -> bool {
    if (x.is_zero()) return false;
    const Vector u = normalized(x, params.norm);
    if (span_of(fp, u, params.rank_tol).full) return false;
    auto cert = invariant_subspace_certificate(family, u, p, params.rank_tol);
    if (!cert) return false;
    report.verdict = Verdict::no;
    report.sigma_upper = 0.0;
    report.sigma_lower = 0.0;
    report.grid_minimum = 0.0;
    report.worst_x = u;
    report.certificate = std::move(cert);
    notes << "invariant subspace of dimension " << report.certificate->size()
          << " verified for every member; sigma = 0 exactly";
    report.notes = notes.str();
    return true;
  };

  for (const Vector& x : invariant_candidates(family, params.seed))
    if (negative(x)) return report;

  // Deterministic grid.
  const std::vector<Vector> grid = sphere_grid(n, params.grid_resolution);
  std::vector<PointValue> gv(grid.size());
  parallel_for(grid.size(), params.threads, [&](std::size_t i) { gv[i] = eval(grid[i]); });
  report.evaluations += grid.size();
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gv[a].upper() < gv[b].upper(); });
  report.grid_minimum = gv[order.front()].upper();
  report.sigma_upper = report.grid_minimum;
  report.worst_x = normalized(grid[order.front()], params.norm);

  // Multistart refinement from the best grid points and seeded random points.
  if (params.multistart > 0) {
    std::vector<Vector> starts;
    const std::size_t from_grid = std::min(order.size(), (params.multistart + 1) / 2);
    for (std::size_t i = 0; i < from_grid; ++i) starts.push_back(grid[order[i]]);
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    while (starts.size() < params.multistart) {
      Vector v(n);
      for (std::size_t j = 0; j < n; ++j) v[j] = unit(rng);
      if (!v.is_zero()) starts.push_back(std::move(v));
    }
    std::vector<std::pair<double, Vector>> results(starts.size());
    std::vector<std::size_t> counts(starts.size(), 0);
    const double step = 0.5 / double(std::max<std::size_t>(params.grid_resolution, 1));
    parallel_for(starts.size(), params.threads, [&](std::size_t i) {
      results[i] = local_descent(eval, starts[i], step, 400, counts[i]);
    });
    for (std::size_t i = 0; i < results.size(); ++i) {
      report.evaluations += counts[i];
      if (results[i].first < report.sigma_upper) {
        report.sigma_upper = results[i].first;
        report.worst_x = results[i].second;
      }
    }
  }

  if (params.certify && n <= params.certify_max_dim) {
    const CertifyOutcome cert = certify_lower_bound(eval, params, report.sigma_upper, report.worst_x);
    report.cells = cert.cells;
    report.evaluations += cert.evaluations;
    report.sigma_lower = cert.lower;
    if (cert.lower)
      notes << "certified lower bound by Lipschitz branch and bound over " << cert.cells << " cells; ";
    else
      notes << "no certified lower bound: " << cert.note << "; ";
  } else if (params.certify) {
    notes << "certification skipped: N = " << n << " exceeds certify_max_dim; ";
  }

  if (report.sigma_lower && *report.sigma_lower > params.yes_threshold) {
    report.verdict = Verdict::yes;
    notes << "certified sigma lower bound exceeds " << params.yes_threshold;
  } else if (negative(report.worst_x)) {
    return report;
  } else if (!report.exploratory && (report.algebra_dimension = algebra_dimension(family, params.rank_tol)) == n * n) {
    // No common invariant subspace, so sigma_p > 0 for every p >= N - 1,
    // but without a numeric lower bound.
    report.verdict = Verdict::yes;
    report.sigma_lower.reset();
    notes << "generated algebra is all of M_N(R): no common invariant subspace, sigma > 0 without a numeric bound";
  } else {
    report.verdict = Verdict::undetermined;
    notes << "neither a positive certified bound nor an invariant subspace was found";
  }
  report.notes = notes.str();
  return report;
}

ContinuityScan continuity_scan(const FamilySource& family_at, const std::vector<double>& taus,
                               const QCParams& params) {
  auto row_for = [&](double tau) {
    const QCReport r = sigma_estimate(family_at(tau), params);
    return ContinuityRow{tau, r.grid_minimum, r.sigma_upper, r.sigma_lower, r.verdict};
  };
  ContinuityScan scan;
  scan.base = row_for(0.0);
  scan.base_quasi_controllable = scan.base.verdict == Verdict::yes;
  bool all_positive = true;
  double uniform = std::numeric_limits<double>::infinity();
  for (double tau : taus) {
    scan.rows.push_back(row_for(tau));
    const auto& lower = scan.rows.back().sigma_lower;
    if (!lower || *lower <= 0.0) all_positive = false;
    else uniform = std::min(uniform, *lower);
  }
  if (all_positive && !scan.rows.empty()) scan.uniform_lower = uniform;
  return scan;
}

}  // namespace peakbound
