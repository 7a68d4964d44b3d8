#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "peakbound/desync.hpp"

using namespace peakbound;

namespace {
const Matrix kSym{{0, 0.5}, {0.5, 0}};
}

TEST_CASE("mixture structure") {
  MixtureFamily mf = mixtures(Matrix::identity(3));
  for (const Matrix& m : mf.members.members()) CHECK(m == Matrix::identity(3));
  mf = mixtures(kSym);
  CHECK(mf.members[0] == Matrix({{0, 0.5}, {0, 1}}));
  CHECK(mf.members[1] == Matrix({{1, 0}, {0.5, 0}}));

  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const Matrix a = oracle::random_matrix(rng, 4);
    const MixtureFamily f = mixtures(a);
    Matrix sum(4, 4);
    for (const Matrix& m : f.members.members()) sum += m - Matrix::identity(4);
    CHECK(max_abs_diff(sum, a - Matrix::identity(4)) < 1e-15);
  }
}

TEST_CASE("irreducibility") {
  CHECK_FALSE(is_irreducible(Matrix{{1, 1}, {0, 1}}));
  CHECK(is_irreducible(kSym));
  CHECK_FALSE(is_irreducible(Matrix::identity(3)));
  CHECK(is_irreducible(Matrix{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
  CHECK_FALSE(is_irreducible(Matrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}));
}

TEST_CASE("alpha and beta") {
  CHECK(alpha(Matrix::identity(2)) == 0.0);
  CHECK(alpha(kSym) == doctest::Approx(1.0 / 8).epsilon(1e-12));
  CHECK(alpha(2.0 * Matrix::identity(2)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(oracle::min_gain_l1_sweep(kSym - Matrix::identity(2)) / 4 == doctest::Approx(1.0 / 8).epsilon(1e-6));
  CHECK(beta(Matrix::identity(2)) == 0.0);
  CHECK_FALSE(mixtures(Matrix::identity(2)).beta_applicable);
  CHECK(beta(kSym) == 0.25);
  CHECK(beta(Matrix{{1, 3}, {-0.2, 1}}) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("mixture bound") {
  BoundResult r = mixture_sigma_bound(kSym);
  REQUIRE(r.value);
  CHECK(*r.value == doctest::Approx(1.0 / 32).epsilon(1e-12));
  r = mixture_sigma_bound(Matrix{{1, 1}, {0, 1}});
  CHECK_FALSE(r.value);
  CHECK(r.reason.find("reducible") != std::string::npos);
  CHECK(r.reason.find("eigenvalue") != std::string::npos);
  CHECK_FALSE(mixture_sigma_bound(Matrix::identity(3)).value);

  r = desync_peak_bound(kSym);
  REQUIRE(r.value);
  CHECK(*r.value == doctest::Approx(32.0).epsilon(1e-12));
  CHECK_FALSE(desync_peak_bound(Matrix{{1, 1}, {0, 1}}).value);
}

TEST_CASE("simulation") {
  const Vector x0{0.3, -0.8};
  DesyncModel id{Matrix::identity(2), Schedule::random(2, 5)};
  Simulation s = simulate(id, x0, 20);
  for (const Vector& x : s.trajectory) CHECK(x == x0);
  CHECK(s.peak_ratio == 1.0);

  const MixtureFamily mf = mixtures(kSym);
  s = simulate({kSym, Schedule::round_robin(2)}, x0, 2);
  REQUIRE(s.trajectory.size() == 3);
  CHECK(max_abs_diff(Matrix::from_columns(std::vector<Vector>{s.trajectory[2]}),
                     Matrix::from_columns(std::vector<Vector>{mf.members[1] * (mf.members[0] * x0)})) == 0.0);

  s = simulate({kSym, Schedule::round_robin(2)}, Vector{0, 0}, 4);
  CHECK(s.zero_initial);
  CHECK(s.peak_ratio == 1.0);

  CHECK_THROWS_AS(simulate({kSym, Schedule::explicit_list({0, 1}, 2)}, x0, 3), InputError);
  CHECK_THROWS_AS(Schedule::explicit_list({0, 2}, 2), InputError);
}

TEST_CASE("random schedules stay within the bound") {
  const double bound = *desync_peak_bound(kSym).value;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Simulation s = simulate({kSym, Schedule::random(2, seed)}, Vector{1, -1}, 200);
    CHECK(s.peak_ratio <= bound + 1e-6);
  }
  CHECK(Schedule::random(3, 9).take(50) == Schedule::random(3, 9).take(50));
}
