#include "peakbound/witness.hpp"

#include <cmath>
#include <mutex>

#include "peakbound/parallel.hpp"

namespace peakbound {

std::optional<ExpandingSeed> find_expanding_seed(const MatrixFamily& family, double sigma_lower, std::size_t depth,
                                                 NormKind norm, std::size_t grid_resolution, std::size_t cap,
                                                 std::size_t threads) {
  if (!(sigma_lower > 0.0)) throw InputError("find_expanding_seed: sigma_lower must be positive");
  if (depth == 0) throw InputError("find_expanding_seed: depth must be at least 1");
  const ProductSet products = enumerate_products(family, depth, kDefaultDedupTol, cap);
  const std::vector<Vector> grid = sphere_grid(family.dim(), grid_resolution);

  const auto& items = products.items();
  std::vector<std::optional<ExpandingSeed>> best_per_item(items.size());
  parallel_for(items.size(), threads, [&](std::size_t k) {
    const ProductItem& item = items[k];
    if (item.word.length() == 0) return;
    auto consider = [&](const Vector& x) {
      const double mu = vector_norm(item.matrix * x, norm) * sigma_lower / vector_norm(x, norm);
      if (!best_per_item[k] || mu > best_per_item[k]->mu)
        best_per_item[k] = ExpandingSeed{item.word, item.matrix, x, mu};
    };
    consider(maximizing_direction(item.matrix, norm));
    for (const Vector& x : grid) consider(x);
  });

  std::optional<ExpandingSeed> best;
  for (auto& candidate : best_per_item)
    if (candidate && (!best || candidate->mu > best->mu)) best = std::move(candidate);
  if (!best || !(best->mu > 1.0)) return std::nullopt;
  return best;
}

ExpansionStep expansion_step(const ProductSet& fp, const Matrix& r, const Vector& x, double mu, NormKind norm) {
  const double base = vector_norm(x, norm);
  if (base == 0.0) throw InputError("expansion_step: x must be nonzero");
  ExpansionStep best;
  best.growth_ratio = -1.0;
  for (const ProductItem& item : fp.items()) {
    Vector y = r * (item.matrix * x);
    const double ratio = vector_norm(y, norm) / base;
    if (ratio > best.growth_ratio) {
      best.chosen = item.word;
      best.growth_ratio = ratio;
      best.next = std::move(y);
    }
  }
  if (best.growth_ratio < mu * (1.0 - 1e-12))
    throw CertificateViolation("expansion step reached ratio " + std::to_string(best.growth_ratio) +
                                   " below mu = " + std::to_string(mu) + "; the sigma lower bound is violated",
                               x, best.growth_ratio, mu);
  return best;
}

bool replay_verify(const MatrixFamily& family, const InstabilityWitness& w, double slack) {
  if (w.trajectory.empty() || w.schedule.size() < w.horizon) return false;
  if (!(w.lambda > 1.0) || !(w.kappa > 0.0)) return false;
  Vector x = w.trajectory.front();
  const double base = vector_norm(x, w.norm);
  if (base == 0.0) return false;
  const double log_kappa = std::log(w.kappa);
  const double log_lambda = std::log(w.lambda);
  for (std::size_t n = 0; n <= w.horizon; ++n) {
    if (n > 0) {
      if (w.schedule[n - 1] >= family.size()) return false;
      x = family[w.schedule[n - 1]] * x;
    }
    const double norm = vector_norm(x, w.norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) return false;
    const double lhs = std::log(norm / base);
    const double rhs = log_kappa + static_cast<double>(n) * log_lambda + std::log1p(-slack);
    if (lhs < rhs) return false;
  }
  std::size_t last = 0;
  for (std::size_t q : w.checkpoints) {
    if (q <= last || q - last > w.block_bound) return false;
    last = q;
  }
  return w.horizon - last <= w.block_bound;
}

WitnessOutcome build_witness(const MatrixFamily& family, std::size_t p, const Vector& x0, std::size_t horizon,
                             const QCParams& params, std::size_t seed_depth) {
  if (x0.dim() != family.dim()) throw InputError("build_witness: x0 dimension mismatch");
  if (x0.is_zero()) throw InputError("build_witness: x0 must be nonzero");
  if (horizon == 0) throw InputError("build_witness: horizon must be positive");
  const NormKind norm = params.norm;

  WitnessOutcome out;
  QCParams qp = params;
  qp.p = p;
  out.qc = sigma_estimate(family, qp);
  if (out.qc->verdict != Verdict::yes || !out.qc->sigma_lower) {
    out.diagnostic = "quasi-controllability not certified (verdict " + to_string(out.qc->verdict) + ")";
    return out;
  }
  const double sigma = *out.qc->sigma_lower;
  auto seed = find_expanding_seed(family, sigma, seed_depth, norm, 4, params.product_cap, params.threads);
  if (!seed) {
    out.diagnostic = "no expanding seed among products of length <= " + std::to_string(seed_depth);
    return out;
  }

  InstabilityWitness w;
  w.seed = *seed;
  w.sigma_lower = sigma;
  w.p = p;
  w.norm = norm;
  w.horizon = horizon;
  w.block_bound = seed->word.length() + p;
  w.trajectory.push_back(x0);

  const ProductSet fp = enumerate_products(family, p, params.dedup_tol, params.product_cap);
  while (w.schedule.size() < horizon) {
    const ExpansionStep step = expansion_step(fp, seed->product, w.trajectory.back(), seed->mu, norm);
    const ProductWord block = step.chosen.followed_by(seed->word);
    for (std::size_t i : block.indices) {
      w.schedule.push_back(i);
      w.trajectory.push_back(family[i] * w.trajectory.back());
    }
    w.checkpoints.push_back(w.schedule.size());
    if (!w.trajectory.back().all_finite()) {
      out.diagnostic = "trajectory overflowed before the horizon";
      return out;
    }
  }
  w.schedule.resize(horizon);
  w.trajectory.resize(horizon + 1);
  while (!w.checkpoints.empty() && w.checkpoints.back() > horizon) w.checkpoints.pop_back();
  if (w.checkpoints.empty()) {
    out.diagnostic = "horizon shorter than the first block";
    return out;
  }

  const double base = vector_norm(x0, norm);
  std::vector<double> log_ratio(horizon + 1);
  for (std::size_t n = 0; n <= horizon; ++n) log_ratio[n] = std::log(vector_norm(w.trajectory[n], norm) / base);
  const std::size_t q_last = w.checkpoints.back();
  const double log_lambda = log_ratio[q_last] / static_cast<double>(q_last);
  double log_kappa = 0.0;
  for (std::size_t n = 0; n <= horizon; ++n)
    log_kappa = std::min(log_kappa, log_ratio[n] - static_cast<double>(n) * log_lambda);
  w.lambda = std::exp(log_lambda);
  w.kappa = std::exp(log_kappa);

  if (!replay_verify(family, w)) {
    out.diagnostic = "replay verification failed";
    return out;
  }
  out.witness = std::move(w);
  return out;
}

std::vector<RobustnessRow> robustness_scan(const FamilySource& family_at, const std::vector<double>& taus,
                                           const QCParams& params, std::size_t horizon, std::size_t seed_depth) {
  std::vector<RobustnessRow> rows;
  for (double tau : taus) {
    const MatrixFamily family = family_at(tau);
    RobustnessRow row;
    row.tau = tau;
    const WitnessOutcome outcome = build_witness(family, params.resolve_p(family.dim()),
                                                 Vector::basis(family.dim(), 0), horizon, params, seed_depth);
    if (outcome.qc) {
      row.verdict = outcome.qc->verdict;
      row.sigma_lower = outcome.qc->sigma_lower;
    }
    row.witness_found = outcome.witness.has_value();
    if (outcome.witness) {
      row.lambda = outcome.witness->lambda;
      row.kappa = outcome.witness->kappa;
    }
    row.diagnostic = outcome.diagnostic;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace peakbound
