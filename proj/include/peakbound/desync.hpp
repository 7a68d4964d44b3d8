#pragma once

// Desynchronized systems x(n+1) = A_{i(n)} x(n): one component updates per
// step, using the i-mixture A_i (identity except row i, which is row i of A).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peakbound/linalg.hpp"
#include "peakbound/semigroup.hpp"

namespace peakbound {

struct MixtureFamily {
  Matrix base;
  MatrixFamily members;
  double alpha = 0.0;
  double beta = 0.0;
  /// False when A has no nonzero off-diagonal entry.
  bool beta_applicable = false;
  /// alpha·beta^(N−1) when A is irreducible and alpha > 0.
  std::optional<double> bound;
};

/// The N mixtures of A, with alpha, beta and the σ_N lower bound filled in.
MixtureFamily mixtures(const Matrix& a, double rank_tol = 1e-9);

/// Strong connectivity of the digraph with an edge j → i for each nonzero
/// off-diagonal a_ij.
bool is_irreducible(const Matrix& a);

/// (1/(2N))·min{‖(A − I)x‖ : ‖x‖ = 1}; exactly 0 when A − I is rank
/// deficient at rank_tol.
double alpha(const Matrix& a, NormKind norm = NormKind::l1, double rank_tol = 1e-9);

/// Half the smallest nonzero off-diagonal magnitude; 0 when there is none.
double beta(const Matrix& a);

struct BoundResult {
  std::optional<double> value;
  std::string reason;
};

/// Lower bound alpha·beta^(N−1) on σ_N of the mixture family; needs A
/// irreducible and 1 not an eigenvalue.
BoundResult mixture_sigma_bound(const Matrix& a, double rank_tol = 1e-9);

/// 1/(alpha·beta^(N−1)) bound on the overshoot of the desynchronized system,
/// valid once the mixture family has a stability certificate within kmax.
BoundResult desync_peak_bound(const Matrix& a, std::size_t kmax = 8, double rank_tol = 1e-9);

enum class ScheduleKind { explicit_list, round_robin, random };

/// Update-index sequence i(0), i(1), ... with 0-based indices.
class Schedule {
 public:
  static Schedule explicit_list(std::vector<std::size_t> indices, std::size_t n);
  static Schedule round_robin(std::size_t n);
  static Schedule random(std::size_t n, std::uint64_t seed);

  ScheduleKind kind() const { return kind_; }
  std::size_t dim() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::size_t>& indices() const { return indices_; }

  /// First `count` indices. Throws InputError when an explicit list is
  /// shorter than `count`.
  std::vector<std::size_t> take(std::size_t count) const;

 private:
  ScheduleKind kind_ = ScheduleKind::round_robin;
  std::size_t n_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> indices_;
};

struct DesyncModel {
  Matrix a;
  Schedule schedule;
};

struct Simulation {
  std::vector<Vector> trajectory;
  std::vector<std::size_t> indices;
  /// max_n ‖x(n)‖/‖x(0)‖; 1 by convention when x(0) = 0.
  double peak_ratio = 1.0;
  bool zero_initial = false;
};

Simulation simulate(const DesyncModel& model, const Vector& x0, std::size_t steps, NormKind norm = NormKind::l1);

}  // namespace peakbound
