#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "peakbound/semigroup.hpp"

using namespace peakbound;

namespace {
const Matrix kSwap{{0, 1}, {1, 0}};
const Matrix kR90{{0, -1}, {1, 0}};
}  // namespace

TEST_CASE("identity family collapses to one item") {
  const ProductSet p = enumerate_products(MatrixFamily({Matrix::identity(2)}), 3);
  CHECK(p.size() == 1);
  CHECK(p.items()[0].word.length() == 0);
}

TEST_CASE("involution gives I and A") {
  const ProductSet p = enumerate_products(MatrixFamily({kSwap}), 2);
  REQUIRE(p.size() == 2);
  CHECK(p.items()[0].matrix == Matrix::identity(2));
  CHECK(p.items()[1].matrix == kSwap);
  CHECK(minimal_length(p, Matrix::identity(2)) == 0);
  CHECK(minimal_length(p, kSwap) == 1);
  CHECK_FALSE(minimal_length(p, kR90).has_value());
}

TEST_CASE("generic pair at depth 2 has seven products") {
  std::mt19937_64 rng(1);
  const Matrix a = oracle::random_matrix(rng, 2), b = oracle::random_matrix(rng, 2);
  const ProductSet p = enumerate_products(MatrixFamily({a, b}), 2);
  CHECK(p.size() == 7);
  // word {0, 1} applies a first, then b
  bool found = false;
  for (const auto& item : p.items())
    if (item.word.indices == std::vector<std::size_t>{0, 1}) found = max_abs_diff(item.matrix, b * a) == 0.0;
  CHECK(found);
}

TEST_CASE("evaluate follows application order") {
  std::mt19937_64 rng(2);
  const MatrixFamily f({oracle::random_matrix(rng, 3), oracle::random_matrix(rng, 3)});
  CHECK(evaluate(f, ProductWord{{0, 1, 1}}) == f[1] * (f[1] * f[0]));
  CHECK(evaluate(f, ProductWord{}) == Matrix::identity(3));
  const ProductWord w = ProductWord{{0}}.followed_by(ProductWord{{1, 1}});
  CHECK(w.indices == std::vector<std::size_t>{0, 1, 1});
}

TEST_CASE("orbits") {
  const ProductSet p = enumerate_products(MatrixFamily({kR90}), 1);
  const auto o = orbit(p, Vector{1, 0});
  REQUIRE(o.size() == 2);
  CHECK(o[0] == Vector{1, 0});
  CHECK(o[1] == Vector{0, 1});
  for (const Vector& v : orbit(p, Vector{0, 0})) CHECK(v.is_zero());
  CHECK_THROWS_AS(orbit(p, Vector{1, 0, 0}), InputError);
}

TEST_CASE("orbit linearity") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    const MatrixFamily f({oracle::random_matrix(rng, 3), oracle::random_matrix(rng, 3)});
    const ProductSet p = enumerate_products(f, 2);
    const Vector x{u(rng), u(rng), u(rng)};
    const double s = u(rng) * 3;
    const auto a = orbit(p, x * s), b = orbit(p, x);
    for (std::size_t i = 0; i < a.size(); ++i)
      CHECK(vector_norm(a[i] - b[i] * s, NormKind::linf) <= 1e-12 * (1 + vector_norm(a[i], NormKind::linf)));
  }
}

TEST_CASE("sizes grow with depth and sets are closed under one more factor") {
  std::mt19937_64 rng(6);
  const MatrixFamily f({oracle::random_matrix(rng, 2), kSwap});
  std::size_t last = 0;
  for (std::size_t k = 0; k <= 5; ++k) {
    const ProductSet p = enumerate_products(f, k);
    CHECK(p.size() >= last);
    CHECK(p.size() <= (std::size_t{1} << (k + 1)) - 1);
    last = p.size();
    for (const auto& item : p.items()) CHECK(item.word.length() <= k);
    if (k == 5) continue;
    const ProductSet next = enumerate_products(f, k + 1);
    for (const auto& item : p.items())
      for (const Matrix& a : f.members()) CHECK(minimal_length(next, a * item.matrix, 1e-12).has_value());
  }
}

TEST_CASE("dedup keeps the span of orbits") {
  // the swap makes many words coincide
  const MatrixFamily f({kSwap, Matrix{{0.5, 0}, {0, 0.5}}});
  const ProductSet dedup = enumerate_products(f, 4);
  std::vector<Matrix> raw{Matrix::identity(2)};
  std::vector<Matrix> level = raw;
  for (int k = 0; k < 4; ++k) {
    std::vector<Matrix> next;
    for (const Matrix& p : level)
      for (const Matrix& a : f.members()) next.push_back(a * p);
    raw.insert(raw.end(), next.begin(), next.end());
    level = next;
  }
  CHECK(dedup.size() < raw.size());
  for (const Vector& x : {Vector{1, 0}, Vector{1, 1}, Vector{0.3, -0.7}}) {
    std::vector<Vector> full;
    for (const Matrix& m : raw) full.push_back(m * x);
    CHECK(rank(orbit(dedup, x)) == rank(full));
  }
}

TEST_CASE("cap is enforced") {
  std::mt19937_64 rng(7);
  const MatrixFamily f({oracle::random_matrix(rng, 2), oracle::random_matrix(rng, 2), oracle::random_matrix(rng, 2)});
  CHECK_THROWS_AS(enumerate_products(f, 12, kDefaultDedupTol, 1000), CapExceeded);
  CHECK_THROWS_AS(enumerate_products(f, 1, -1.0), InputError);
}

TEST_CASE("family validation") {
  CHECK_THROWS_AS(MatrixFamily(std::vector<Matrix>{}), InputError);
  CHECK_THROWS_AS(MatrixFamily({Matrix::identity(2), Matrix::identity(3)}), InputError);
  CHECK_THROWS_AS(MatrixFamily({Matrix(2, 3)}), InputError);
  CHECK_THROWS_AS(MatrixFamily({Matrix{{1, std::numeric_limits<double>::quiet_NaN()}, {0, 1}}}), InputError);
  CHECK(MatrixFamily({kSwap, kSwap}).without_duplicates().size() == 1);
}
