#include <cmath>

#include "doctest.h"
#include "peakbound/stability.hpp"
#include "peakbound/witness.hpp"

using namespace peakbound;

namespace {
const Matrix kR90{{0, -1}, {1, 0}};
const Matrix kShear{{1, 1}, {0, 1}};
}  // namespace

TEST_CASE("expanding seeds") {
  CHECK_FALSE(find_expanding_seed(MatrixFamily({0.5 * Matrix::identity(2)}), 1.0, 4));
  const auto s = find_expanding_seed(MatrixFamily({2.0 * kR90}), 1.0, 1, NormKind::l2);
  REQUIRE(s);
  CHECK(s->word.length() == 1);
  CHECK(s->mu == doctest::Approx(2.0).epsilon(1e-12));
  const auto t = find_expanding_seed(MatrixFamily({kShear, kR90}), 0.2, 6);
  REQUIRE(t);
  CHECK(t->mu > 1.0);
}

TEST_CASE("expansion step") {
  const ProductSet fi = enumerate_products(MatrixFamily({Matrix::identity(2)}), 1);
  const ExpansionStep step = expansion_step(fi, 2.0 * Matrix::identity(2), Vector{0.3, 0.4}, 2.0, NormKind::l1);
  CHECK(step.chosen.length() == 0);
  CHECK(step.growth_ratio == doctest::Approx(2.0).epsilon(1e-15));

  const ProductSet fr = enumerate_products(MatrixFamily({2.0 * kR90}), 1);
  Vector x{1, 0};
  for (int i = 0; i < 5; ++i) {
    const ExpansionStep s = expansion_step(fr, 2.0 * kR90, x, 2.0, NormKind::l2);
    CHECK(s.growth_ratio >= 2.0 * (1 - 1e-12));
    x = s.next;
  }
  CHECK_THROWS_AS(expansion_step(fi, 2.0 * Matrix::identity(2), Vector{1, 0}, 3.0, NormKind::l1),
                  CertificateViolation);
}

TEST_CASE("witness for the scaled rotation") {
  QCParams params;
  params.norm = NormKind::l2;
  const MatrixFamily f({2.0 * kR90});
  const WitnessOutcome w = build_witness(f, 1, Vector{1, 0}, 50, params);
  REQUIRE(w.witness);
  CHECK(std::abs(w.witness->lambda - 2.0) <= 1e-12);
  CHECK(w.witness->kappa == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t n = 0; n < w.witness->trajectory.size(); ++n)
    CHECK(vector_norm(w.witness->trajectory[n], NormKind::l2) == doctest::Approx(std::ldexp(1.0, int(n))));
  CHECK(replay_verify(f, *w.witness));
}

TEST_CASE("witness for shear and rotation") {
  const MatrixFamily f({kShear, kR90});
  const WitnessOutcome w = build_witness(f, 1, Vector{1, 0}, 200);
  REQUIRE(w.witness);
  CHECK(w.witness->lambda > 1.0);
  CHECK(replay_verify(f, *w.witness));
  for (std::size_t i = 1; i < w.witness->checkpoints.size(); ++i)
    CHECK(w.witness->checkpoints[i] - w.witness->checkpoints[i - 1] <= w.witness->block_bound);
  for (std::size_t k : {1u, 4u, 8u}) CHECK_FALSE(stability_certificate(f, k));

  InstabilityWitness tampered = *w.witness;
  tampered.lambda *= 1.5;
  CHECK_FALSE(replay_verify(f, tampered));
}

TEST_CASE("no witness for a contraction") {
  const WitnessOutcome w = build_witness(MatrixFamily({0.5 * Matrix::identity(2)}), 1, Vector{1, 0}, 50);
  CHECK_FALSE(w.witness);
  CHECK_FALSE(w.diagnostic.empty());
}

TEST_CASE("robustness scan") {
  const auto rows = robustness_scan([](double) { return MatrixFamily({kShear, kR90}); }, {0.1, 0.01}, QCParams{}, 60);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].witness_found);
  CHECK(rows[1].witness_found);
  CHECK(*rows[0].lambda == *rows[1].lambda);

  const auto pert = robustness_scan(
      [](double t) { return MatrixFamily({kShear + t * Matrix{{0, 0}, {1, 0}}, kR90 + t * Matrix::identity(2)}); },
      {0.1, 0.01, 0.001}, QCParams{}, 60);
  for (const RobustnessRow& r : pert) CHECK(r.witness_found);
}
