#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "peakbound/desync.hpp"
#include "peakbound/qc.hpp"

using namespace peakbound;

namespace {
const Matrix kR90{{0, -1}, {1, 0}};
const Matrix kShear{{1, 1}, {0, 1}};
const Matrix kSym{{0, 0.5}, {0.5, 0}};

Matrix permute(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(perm[i], perm[j]);
  return out;
}
}  // namespace

TEST_CASE("span test") {
  SpanResult r = span_test(MatrixFamily({Matrix::identity(2)}), 1, Vector{1, 0});
  CHECK_FALSE(r.full);
  CHECK(r.dimension == 1);
  r = span_test(MatrixFamily({kR90}), 1, Vector{1, 0});
  CHECK(r.full);
  CHECK(r.dimension == 2);
  r = span_test(MatrixFamily({kShear}), 1, Vector{1, 0});
  CHECK_FALSE(r.full);
  CHECK(r.dimension == 1);
}

TEST_CASE("radius at a point") {
  CHECK(radius_at(MatrixFamily({Matrix::identity(2)}), 2, Vector{1, 0}, NormKind::l1) == 0.0);
  CHECK(radius_at(MatrixFamily({kR90}), 1, Vector{1, 0}, NormKind::l1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(radius_at(MatrixFamily({kR90}), 1, Vector{0.5, 0.5}, NormKind::l1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("radius is scale invariant in x") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const MatrixFamily f({oracle::random_matrix(rng, 3), oracle::random_matrix(rng, 3)});
  const ProductSet fp = enumerate_products(f, 2);
  for (int t = 0; t < 10; ++t) {
    const Vector x{u(rng), u(rng), u(rng)};
    const double base = radius_at(fp, x, NormKind::l1);
    for (double s : {2.0, -1.0, 0.125, -8.0}) CHECK(radius_at(fp, x * s, NormKind::l1) == base);
  }
}

TEST_CASE("radius grows with p") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 5; ++t) {
    const MatrixFamily f({oracle::random_matrix(rng, 3), oracle::random_matrix(rng, 3)});
    const Vector x{u(rng), u(rng), u(rng)};
    double prev = 0.0;
    for (std::size_t p = 0; p <= 3; ++p) {
      const double r = radius_at(f, p, x, NormKind::l1);
      CHECK(r >= prev - 1e-12);
      prev = r;
    }
  }
}

TEST_CASE("identity family is not quasi-controllable") {
  const MatrixFamily f({Matrix::identity(2)});
  QCParams params;
  params.p = 1;
  const QCReport r = sigma_estimate(f, params);
  CHECK(r.verdict == Verdict::no);
  CHECK(r.sigma_upper == 0.0);
  REQUIRE(r.certificate);
  CHECK(verify_invariant_subspace(f, *r.certificate));
}

TEST_CASE("symmetric mixtures meet the mixture bound") {
  const MixtureFamily mf = mixtures(kSym);
  QCParams params;
  params.p = 2;
  const QCReport r = sigma_estimate(mf.members, params);
  CHECK(r.verdict == Verdict::yes);
  REQUIRE(r.sigma_lower);
  CHECK(*r.sigma_lower > 1e-7);
  CHECK(*r.sigma_lower <= r.sigma_upper);
  CHECK(r.sigma_upper >= 1.0 / 32 - 1e-9);
}

TEST_CASE("feedback pair with a controllable and observable triple") {
  const Matrix a{{0, 1}, {-0.5, 0.3}};
  const Vector b{0, 1}, c{1, 0};
  const double g = 0.7;
  const MatrixFamily f({a - g * outer(b, c), a + g * outer(b, c)});
  const QCReport r = sigma_estimate(f);
  CHECK(r.verdict == Verdict::yes);
}

TEST_CASE("invariant subspace certificates") {
  auto basis = invariant_subspace_certificate(MatrixFamily({kShear}), Vector{1, 0}, 1);
  REQUIRE(basis);
  REQUIRE(basis->size() == 1);
  CHECK(std::abs((*basis)[0][1]) < 1e-12);
  basis = invariant_subspace_certificate(MatrixFamily({Matrix::identity(2)}), Vector{1, 1}, 1);
  REQUIRE(basis);
  REQUIRE(basis->size() == 1);
  CHECK(std::abs((*basis)[0][0] - (*basis)[0][1]) < 1e-12);
  CHECK_FALSE(invariant_subspace_certificate(MatrixFamily({kR90}), Vector{1, 0}, 1));
  CHECK_FALSE(verify_invariant_subspace(MatrixFamily({kR90}), {Vector{1, 0}}));
  CHECK_FALSE(verify_invariant_subspace(MatrixFamily({kR90}), {}));
}

TEST_CASE("dichotomy on random families") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 6; ++t) {
    Matrix a = oracle::random_matrix(rng, 3), b = oracle::random_matrix(rng, 3);
    const bool triangular = t % 2 == 0;
    if (triangular) a(2, 0) = a(2, 1) = b(2, 0) = b(2, 1) = 0.0;
    const MatrixFamily f({a, b});
    const QCReport r = sigma_estimate(f);
    CHECK(r.verdict != Verdict::undetermined);
    if (r.verdict == Verdict::yes) {
      CHECK_FALSE(triangular);
      CHECK((!r.sigma_lower || *r.sigma_lower > 0.0));
    } else {
      CHECK(triangular);
      REQUIRE(r.certificate);
      CHECK(verify_invariant_subspace(f, *r.certificate));
    }
  }
}

TEST_CASE("permuting coordinates leaves the estimate unchanged") {
  std::mt19937_64 rng(5);
  const Matrix a = oracle::random_matrix(rng, 2), b = oracle::random_matrix(rng, 2);
  const std::vector<std::size_t> perm{1, 0};
  QCParams params;
  params.certify = false;
  const QCReport r1 = sigma_estimate(MatrixFamily({a, b}), params);
  const QCReport r2 = sigma_estimate(MatrixFamily({permute(a, perm), permute(b, perm)}), params);
  CHECK(std::abs(r1.grid_minimum - r2.grid_minimum) < 1e-7);
  CHECK(std::abs(r1.sigma_upper - r2.sigma_upper) < 1e-7);
}

TEST_CASE("algebra dimension") {
  CHECK(algebra_dimension(MatrixFamily({Matrix::identity(2)})) == 1);
  CHECK(algebra_dimension(MatrixFamily({kShear})) == 2);
  CHECK(algebra_dimension(MatrixFamily({kShear, kR90})) == 4);
}

TEST_CASE("exploratory depth is refused unless requested") {
  const MatrixFamily f({Matrix::identity(3)});
  QCParams params;
  params.p = 1;
  CHECK_THROWS_AS(sigma_estimate(f, params), InputError);
  params.exploratory = true;
  const QCReport r = sigma_estimate(f, params);
  CHECK(r.exploratory);
}

TEST_CASE("sphere grid is one-sided and on the sphere") {
  const auto grid = sphere_grid(3, 4);
  for (const Vector& v : grid) {
    CHECK(vector_norm(v, NormKind::l1) == doctest::Approx(1.0).epsilon(1e-12));
    const auto it = std::find_if(v.values().begin(), v.values().end(), [](double z) { return z != 0.0; });
    CHECK(*it > 0.0);
  }
}

TEST_CASE("continuity scans") {
  const Matrix e{{0.2, -0.3}, {0.4, 0.1}};
  QCParams params;
  params.p = 2;
  const ContinuityScan constant =
      continuity_scan([&](double) { return mixtures(kSym).members; }, {0.1, 0.01}, params);
  for (const ContinuityRow& row : constant.rows) CHECK(row.sigma_grid == constant.base.sigma_grid);
  CHECK(constant.base_quasi_controllable);

  const ContinuityScan s = continuity_scan([&](double t) { return mixtures(kSym + t * e).members; },
                                           {0.1, 0.01, 0.001}, params);
  double prev = 1e300;
  for (const ContinuityRow& row : s.rows) {
    const double gap = std::abs(row.sigma_grid - s.base.sigma_grid);
    CHECK(gap < prev);
    prev = gap;
  }
  REQUIRE(s.uniform_lower);
  CHECK(*s.uniform_lower > 0.0);

  // Lower-left entry vanishes at τ = 0.5, so both members become triangular.
  const Matrix b{{0.3, 0.6}, {0.25, -0.2}};
  const ContinuityScan collapse = continuity_scan(
      [&](double t) {
        Matrix m1 = b, m2 = b * 0.5;
        m1(1, 0) = m2(1, 0) = 0.5 - t;
        m2(0, 0) = -0.4;
        return MatrixFamily({m1, m2});
      },
      {0.3, 0.45, 0.5}, QCParams{});
  CHECK(collapse.rows[0].sigma_grid > collapse.rows[1].sigma_grid);
  CHECK(collapse.rows[2].verdict == Verdict::no);
  CHECK(collapse.rows[2].sigma_grid == 0.0);
}
