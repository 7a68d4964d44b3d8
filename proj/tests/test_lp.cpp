#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "peakbound/lp.hpp"

using namespace peakbound;

TEST_CASE("single bound") {
  LPProblem lp;
  lp.objective = {1.0};
  lp.inequalities = {{{1.0}}, {1.0}};
  const LPResult r = lp_solve(lp);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.optimum == 1.0);
  CHECK(r.solution[0] == 1.0);
}

TEST_CASE("contradictory bounds are infeasible") {
  LPProblem lp;
  lp.objective = {1.0};
  lp.inequalities = {{{1.0}, {1.0}}, {1.0, -1.0}};
  CHECK(lp_solve(lp).status == LPStatus::infeasible);
}

TEST_CASE("unbounded") {
  LPProblem lp;
  lp.objective = {1.0, 0.0};
  lp.inequalities = {{{0.0, 1.0}}, {1.0}};
  CHECK(lp_solve(lp).status == LPStatus::unbounded);
}

TEST_CASE("free variables and minimization") {
  LPProblem lp;
  lp.objective = {1.0};
  lp.sense = LPSense::minimize;
  lp.lower_bounds = std::vector<double>{-std::numeric_limits<double>::infinity()};
  lp.inequalities = {{{-1.0}}, {3.0}};  // x ≥ -3
  const LPResult r = lp_solve(lp);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.optimum == doctest::Approx(-3.0));
}

TEST_CASE("membership of e1 in absco{e1, e2}") {
  // variables θ1+, θ2+, θ1-, θ2-, t
  LPProblem lp;
  lp.objective = {0, 0, 0, 0, 1};
  lp.equalities = {{{1, 0, -1, 0, -1}, {0, 1, 0, -1, 0}}, {0, 0}};
  lp.inequalities = {{{1, 1, 1, 1, 0}}, {1}};
  const LPResult r = lp_solve(lp);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.optimum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dimension mismatch") {
  LPProblem lp;
  lp.objective = {1.0, 1.0};
  lp.inequalities = {{{1.0}}, {1.0}};
  CHECK_THROWS_AS(lp_solve(lp), InputError);
}

TEST_CASE("nearly parallel columns with zero right-hand sides") {
  // Regression: tiny degenerate pivots used to corrupt the tableau here.
  const std::vector<Vector> v{{0.26135605737310763, -0.65367043454880813, 0.084973508078084306},
                              {0.261333, -0.65367, 0.0849735},
                              {0.261338, -0.65367, 0.0849735},
                              {0.261356, 0.383573, 0.0849735},
                              {0.261356, -0.65367, -0.471048},
                              {-0.323869, 0.383573, 0.0849735}};
  const std::size_t q = v.size(), nv = 2 * q + 1;
  LPProblem lp;
  lp.objective.assign(nv, 0.0);
  lp.objective[nv - 1] = 1.0;
  for (std::size_t r = 0; r < 3; ++r) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t i = 0; i < q; ++i) {
      row[i] = v[i][r];
      row[q + i] = -v[i][r];
    }
    row[nv - 1] = r == 0 ? -1.0 : 0.0;
    lp.equalities.rows.push_back(row);
    lp.equalities.rhs.push_back(0.0);
  }
  std::vector<double> budget(nv, 1.0);
  budget[nv - 1] = 0.0;
  lp.inequalities = {{budget}, {1.0}};
  const LPResult r = lp_solve(lp);
  REQUIRE(r.status == LPStatus::optimal);
  CHECK(r.optimum > 0.0);
}

TEST_CASE("agrees with vertex enumeration on random bounded LPs") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1, 1);
  int solved = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 4;
    LPProblem lp;
    for (std::size_t j = 0; j < n; ++j) lp.objective.push_back(u(rng));
    const std::size_t m = 2 + t % 5;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row;
      for (std::size_t j = 0; j < n; ++j) row.push_back(u(rng));
      lp.inequalities.rows.push_back(row);
      lp.inequalities.rhs.push_back(u(rng) + 0.5);
    }
    // box keeps it bounded
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> row(n, 0.0);
      row[j] = 1.0;
      lp.inequalities.rows.push_back(row);
      lp.inequalities.rhs.push_back(2.0);
    }
    if (t % 3 == 0) {
      std::vector<double> row;
      for (std::size_t j = 0; j < n; ++j) row.push_back(std::abs(u(rng)));
      lp.equalities.rows.push_back(row);
      lp.equalities.rhs.push_back(0.3);
    }
    const auto expected = oracle::vertex_enumeration(lp);
    const LPResult r = lp_solve(lp);
    if (!expected) {
      CHECK(r.status == LPStatus::infeasible);
      continue;
    }
    REQUIRE(r.status == LPStatus::optimal);
    CHECK(std::abs(r.optimum - *expected) <= 1e-7);
    ++solved;
  }
  CHECK(solved > 50);
}
