#include "peakbound/desync.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "peakbound/stability.hpp"

namespace peakbound {

MixtureFamily mixtures(const Matrix& a, double rank_tol) {
  require_square(a, "mixtures");
  const std::size_t n = a.rows();
  std::vector<Matrix> members;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix m = Matrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) m(i, c) = a(i, c);
    members.push_back(std::move(m));
    labels.push_back("A_" + std::to_string(i + 1));
  }
  MixtureFamily out;
  out.base = a;
  out.members = MatrixFamily(std::move(members), std::move(labels));
  out.alpha = alpha(a, NormKind::l1, rank_tol);
  out.beta = beta(a);
  out.beta_applicable = out.beta > 0.0;
  out.bound = mixture_sigma_bound(a, rank_tol).value;
  return out;
}

bool is_irreducible(const Matrix& a) {
  require_square(a, "is_irreducible");
  const std::size_t n = a.rows();
  if (n == 1) return true;
  // Strongly connected iff node 0 reaches everything forwards and backwards.
  auto reaches_all = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> todo{0};
    seen[0] = true;
    while (!todo.empty()) {
      const std::size_t j = todo.back();
      todo.pop_back();
      for (std::size_t i = 0; i < n; ++i) {
        const double w = forward ? a(i, j) : a(j, i);
        if (i != j && w != 0.0 && !seen[i]) {
          seen[i] = true;
          todo.push_back(i);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
  };
  return reaches_all(true) && reaches_all(false);
}

double alpha(const Matrix& a, NormKind norm, double rank_tol) {
  require_square(a, "alpha");
  const std::size_t n = a.rows();
  return min_gain(a - Matrix::identity(n), norm, rank_tol) / (2.0 * static_cast<double>(n));
}

double beta(const Matrix& a) {
  require_square(a, "beta");
  double smallest = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double v = std::abs(a(i, j));
      if (i != j && v != 0.0 && (smallest == 0.0 || v < smallest)) smallest = v;
    }
  return smallest / 2.0;
}

BoundResult mixture_sigma_bound(const Matrix& a, double rank_tol) {
  const bool irreducible = is_irreducible(a);
  const double al = alpha(a, NormKind::l1, rank_tol);
  BoundResult out;
  if (!irreducible && al <= 0.0) {
    out.reason = "A is reducible, and 1 is an eigenvalue of A";
  } else if (!irreducible) {
    out.reason = "A is reducible";
  } else if (al <= 0.0) {
    out.reason = "1 is an eigenvalue of A";
  } else {
    const double n = static_cast<double>(a.rows());
    out.value = al * std::pow(beta(a), n - 1.0);
  }
  return out;
}

BoundResult desync_peak_bound(const Matrix& a, std::size_t kmax, double rank_tol) {
  BoundResult sigma = mixture_sigma_bound(a, rank_tol);
  if (!sigma.value) return sigma;
  const MixtureFamily fam = mixtures(a, rank_tol);
  if (!stability_certificate(fam.members, kmax))
    return {std::nullopt, "no stability certificate for the mixture family within kmax = " + std::to_string(kmax)};
  return {1.0 / *sigma.value, ""};
}

Schedule Schedule::explicit_list(std::vector<std::size_t> indices, std::size_t n) {
  for (std::size_t i : indices)
    if (i >= n) throw InputError("schedule index out of range");
  Schedule s;
  s.kind_ = ScheduleKind::explicit_list;
  s.n_ = n;
  s.indices_ = std::move(indices);
  return s;
}

Schedule Schedule::round_robin(std::size_t n) {
  if (n == 0) throw InputError("schedule dimension must be positive");
  Schedule s;
  s.kind_ = ScheduleKind::round_robin;
  s.n_ = n;
  return s;
}

Schedule Schedule::random(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InputError("schedule dimension must be positive");
  Schedule s;
  s.kind_ = ScheduleKind::random;
  s.n_ = n;
  s.seed_ = seed;
  return s;
}

std::vector<std::size_t> Schedule::take(std::size_t count) const {
  switch (kind_) {
    case ScheduleKind::explicit_list:
      if (indices_.size() < count)
        throw InputError("explicit schedule has " + std::to_string(indices_.size()) + " entries, " +
                         std::to_string(count) + " needed");
      return {indices_.begin(), indices_.begin() + static_cast<std::ptrdiff_t>(count)};
    case ScheduleKind::round_robin: {
      std::vector<std::size_t> out(count);
      for (std::size_t t = 0; t < count; ++t) out[t] = t % n_;
      return out;
    }
    case ScheduleKind::random: {
      std::mt19937_64 rng(seed_);
      std::vector<std::size_t> out(count);
      for (auto& i : out) i = static_cast<std::size_t>(rng() % n_);
      return out;
    }
  }
  return {};
}

Simulation simulate(const DesyncModel& model, const Vector& x0, std::size_t steps, NormKind norm) {
  require_square(model.a, "simulate");
  const std::size_t n = model.a.rows();
  if (x0.dim() != n) throw InputError("simulate: x0 dimension mismatch");
  if (model.schedule.dim() != n) throw InputError("simulate: schedule dimension mismatch");
  Simulation sim;
  sim.indices = model.schedule.take(steps);
  sim.trajectory.reserve(steps + 1);
  sim.trajectory.push_back(x0);
  const double base = vector_norm(x0, norm);
  sim.zero_initial = base == 0.0;
  for (std::size_t i : sim.indices) {
    Vector x = sim.trajectory.back();
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += model.a(i, j) * x[j];
    x[i] = s;
    if (!sim.zero_initial) sim.peak_ratio = std::max(sim.peak_ratio, vector_norm(x, norm) / base);
    sim.trajectory.push_back(std::move(x));
  }
  return sim;
}

}  // namespace peakbound
