#include "peakbound/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace peakbound {

namespace {

// Slack on q ≤ 1 so that exactly non-expansive members (norm 1 computed as
// 1 + ulp) are not rejected.
constexpr double kUnitSlack = 4.0 * std::numeric_limits<double>::epsilon();

std::array<NormKind, 3> norm_order(NormKind first) {
  std::array<NormKind, 3> order{first, NormKind::l1, NormKind::linf};
  if (first == NormKind::l1) order[1] = NormKind::l2;
  if (first == NormKind::linf) order[2] = NormKind::l2;
  return order;
}

}  // namespace

std::optional<StabilityCertificate> stability_certificate(const MatrixFamily& family, std::size_t kmax,
                                                          NormKind norm, std::size_t cap) {
  if (kmax == 0) throw InputError("stability_certificate: kmax must be at least 1");
  const std::size_t n = family.dim();

  // levels[j] holds every product of exactly j factors.
  std::vector<std::vector<Matrix>> levels{{Matrix::identity(n)}};
  bool capped = false;
  for (std::size_t j = 1; j <= kmax; ++j) {
    const std::size_t count = levels.back().size() * family.size();
    if (count > cap) {
      capped = true;
      break;
    }
    std::vector<Matrix> next;
    next.reserve(count);
    for (const Matrix& p : levels.back())
      for (const Matrix& a : family.members()) next.push_back(a * p);
    levels.push_back(std::move(next));
  }

  for (NormKind candidate : norm_order(norm)) {
    double mu = 1.0;
    for (std::size_t k = 1; k < levels.size(); ++k) {
      double q = 0.0;
      for (const Matrix& p : levels[k]) q = std::max(q, induced_norm(p, candidate));
      if (q <= 1.0 + kUnitSlack) return StabilityCertificate{k, q, mu, candidate, q < 1.0};
      mu = std::max(mu, q);
    }
  }
  if (capped) throw CapExceeded("stability_certificate: product cap reached before a certificate was found");
  return std::nullopt;
}

ChiLowerResult chi_lower(const MatrixFamily& family, std::size_t depth, NormKind norm, std::size_t node_cap) {
  const std::size_t n = family.dim();
  const std::size_t m = family.size();

  // growth[j]: exact max norm over products of length ≤ j, for j ≤ h.
  std::vector<double> growth{1.0};
  {
    std::vector<Matrix> level{Matrix::identity(n)};
    std::size_t total = 1;
    while (growth.size() <= std::min<std::size_t>(depth, 64) && total + level.size() * m <= 4096) {
      std::vector<Matrix> next;
      next.reserve(level.size() * m);
      double g = growth.back();
      for (const Matrix& p : level)
        for (const Matrix& a : family.members()) {
          next.push_back(a * p);
          g = std::max(g, induced_norm(next.back(), norm));
        }
      total += next.size();
      growth.push_back(g);
      level = std::move(next);
    }
  }
  const std::size_t h = growth.size() - 1;
  // bound[j] ≥ norm of any product of length ≤ j, by submultiplicativity.
  std::vector<double> bound(depth + 1, 1.0);
  for (std::size_t j = 0; j <= depth; ++j) {
    if (j <= h) {
      bound[j] = growth[j];
    } else {
      bound[j] = std::pow(growth[h], static_cast<double>(j / h)) * growth[j % h];
      bound[j] = std::max(bound[j], bound[j - 1]);
    }
  }

  ChiLowerResult best;
  best.bound = 1.0;
  best.nodes = 1;
  if (depth == 0) return best;

  struct Frame {
    Matrix product;
    double norm = 1.0;
    std::size_t next_child = 0;
  };
  std::vector<Frame> stack;
  stack.reserve(depth + 1);
  stack.push_back({Matrix::identity(n), 1.0, 0});
  std::vector<std::size_t> word;
  constexpr double kSafety = 1.0 + 1e-9;

  while (!stack.empty()) {
    Frame& top = stack.back();
    const std::size_t level = stack.size() - 1;
    if (level == depth || top.next_child == m) {
      stack.pop_back();
      if (!word.empty()) word.pop_back();
      continue;
    }
    if (top.next_child == 0 && level > 0) {
      if (top.norm * bound[depth - level] * kSafety <= best.bound) {
        stack.pop_back();
        word.pop_back();
        continue;
      }
    }
    const std::size_t i = top.next_child++;
    Matrix child = family[i] * top.product;
    const double value = induced_norm(child, norm);
    word.push_back(i);
    if (++best.nodes > node_cap)
      throw CapExceeded("chi_lower: node cap exceeded before the search closed");
    if (!std::isfinite(value)) throw InputError("chi_lower: product norm overflowed");
    if (value > best.bound) {
      best.bound = value;
      best.word.indices = word;
    }
    stack.push_back({std::move(child), value, 0});
  }
  return best;
}

ChiUpper chi_upper(const MatrixFamily& family, const QCParams& params, std::size_t kmax) {
  ChiUpper out;
  out.certificate = stability_certificate(family, kmax, params.norm, params.product_cap);
  if (!out.certificate) {
    out.reason = "no stability certificate within kmax = " + std::to_string(kmax);
    return out;
  }
  out.qc = sigma_estimate(family, params);
  if (out.qc->verdict == Verdict::no) {
    out.reason = "not quasi-controllable";
  } else if (out.qc->verdict != Verdict::yes || !out.qc->sigma_lower || *out.qc->sigma_lower <= 0.0) {
    out.reason = "quasi-controllability not certified";
  } else {
    out.value = 1.0 / *out.qc->sigma_lower;
  }
  return out;
}

std::string to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::certified_stable: return "certified stable";
    case StabilityVerdict::certified_unstable: return "certified unstable";
    case StabilityVerdict::unknown: return "unknown";
  }
  return "unknown";
}

PeakReport peak_report(const MatrixFamily& family, std::size_t depth, const QCParams& params, std::size_t kmax) {
  PeakReport report;
  const ChiLowerResult lower = chi_lower(family, depth, params.norm);
  report.chi_lower = lower.bound;
  report.chi_lower_word = lower.word;
  report.nodes = lower.nodes;
  report.depth = depth;
  ChiUpper upper = chi_upper(family, params, kmax);
  report.certificate = upper.certificate;
  report.qc = std::move(upper.qc);
  report.chi_upper = upper.value;
  report.upper_reason = upper.reason;
  if (report.certificate) report.verdict = StabilityVerdict::certified_stable;
  if (report.chi_upper) report.provenance = "chi <= 1/sigma_p with certified sigma lower bound";
  return report;
}

namespace {

// |cᵀ(ωI − A)⁻¹b| at ω = e^{iθ}; nullopt when the system is singular.
std::optional<double> transfer_gain(const Matrix& a, const Vector& b, const Vector& c, double theta) {
  using cd = std::complex<double>;
  const std::size_t n = a.rows();
  const cd omega = std::polar(1.0, theta);
  std::vector<cd> m(n * (n + 1));
  double scale = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t col = 0; col < n; ++col) {
      m[r * (n + 1) + col] = (r == col ? omega : cd{}) - a(r, col);
      scale = std::max(scale, std::abs(a(r, col)));
    }
    m[r * (n + 1) + n] = b[r];
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(m[r * (n + 1) + k]) > std::abs(m[piv * (n + 1) + k])) piv = r;
    if (std::abs(m[piv * (n + 1) + k]) <= 1e-13 * scale) return std::nullopt;
    if (piv != k)
      for (std::size_t col = 0; col <= n; ++col) std::swap(m[k * (n + 1) + col], m[piv * (n + 1) + col]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const cd f = m[r * (n + 1) + k] / m[k * (n + 1) + k];
      for (std::size_t col = k; col <= n; ++col) m[r * (n + 1) + col] -= f * m[k * (n + 1) + col];
    }
  }
  std::vector<cd> x(n);
  for (std::size_t k = n; k-- > 0;) {
    cd s = m[k * (n + 1) + n];
    for (std::size_t col = k + 1; col < n; ++col) s -= m[k * (n + 1) + col] * x[col];
    x[k] = s / m[k * (n + 1) + k];
  }
  cd g{};
  for (std::size_t k = 0; k < n; ++k) g += c[k] * x[k];
  return std::abs(g);
}

}  // namespace

CircleFeedback circle_feedback_family(const Matrix& a, const Vector& b, const Vector& c, double gamma,
                                      std::size_t samples) {
  require_square(a, "circle_feedback_family");
  if (b.dim() != a.rows() || c.dim() != a.rows())
    throw InputError("circle_feedback_family: b and c must match the dimension of A");
  if (samples < 8) throw InputError("circle_feedback_family: at least 8 samples required");
  if (!std::isfinite(gamma)) throw InputError("circle_feedback_family: gamma must be finite");

  CircleFeedback out;
  const Matrix k = outer(b, c) * gamma;
  out.family = MatrixFamily({a - k, a + k}).without_duplicates();

  const double step = 2.0 * std::numbers::pi / static_cast<double>(samples);
  std::vector<double> gains(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const double theta = step * static_cast<double>(s);
    const auto g = transfer_gain(a, b, c, theta);
    if (!g) {
      out.max_gain = std::numeric_limits<double>::infinity();
      out.worst_angle = theta;
      out.holds = false;
      out.margin = -std::numeric_limits<double>::infinity();
      out.diagnostic = "omega*I - A is singular at angle " + std::to_string(theta) + " (spectrum meets the unit circle)";
      return out;
    }
    gains[s] = *g;
    if (*g > out.max_gain) {
      out.max_gain = *g;
      out.worst_angle = theta;
    }
  }

  // Golden-section refinement around each sampled local maximum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double prev = gains[(s + samples - 1) % samples];
    const double next = gains[(s + 1) % samples];
    if (gains[s] < prev || gains[s] < next) continue;
    double lo = step * (static_cast<double>(s) - 1.0);
    double hi = step * (static_cast<double>(s) + 1.0);
    for (int it = 0; it < 60; ++it) {
      const double x1 = hi - inv_phi * (hi - lo);
      const double x2 = lo + inv_phi * (hi - lo);
      const auto g1 = transfer_gain(a, b, c, x1);
      const auto g2 = transfer_gain(a, b, c, x2);
      if (!g1 || !g2) break;
      if (*g1 > out.max_gain) out.max_gain = *g1, out.worst_angle = x1;
      if (*g2 > out.max_gain) out.max_gain = *g2, out.worst_angle = x2;
      if (*g1 >= *g2) hi = x2;
      else lo = x1;
    }
  }
  out.margin = 1.0 - std::abs(gamma) * out.max_gain;
  out.holds = out.margin > 0.0;
  return out;
}

}  // namespace peakbound
