#pragma once

// Dense real linear algebra for small systems (N up to ~8).

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace peakbound {

/// Raised for malformed inputs: dimension mismatches, non-finite entries,
/// violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class NormKind { l1, l2, linf };

std::string to_string(NormKind norm);
/// Accepts "l1"/"ell1", "l2"/"ell2", "linf"/"ellinf".
NormKind parse_norm(std::string_view text);

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0);
  Vector(std::initializer_list<double> values);
  explicit Vector(std::vector<double> values);

  static Vector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& raw() const { return values_; }

  bool is_zero() const;
  bool all_finite() const;

  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double s);

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(Vector a, double s) { return a *= s; }
  friend Vector operator*(double s, Vector a) { return a *= s; }
  friend Vector operator-(Vector a) { return a *= -1.0; }
  bool operator==(const Vector& other) const = default;

 private:
  std::vector<double> values_;
};

double dot(const Vector& a, const Vector& b);

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  static Matrix from_columns(std::span<const Vector> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> data() const { return data_; }

  Vector row(std::size_t r) const;
  Vector column(std::size_t c) const;
  std::vector<std::vector<double>> to_rows() const;
  Matrix transpose() const;
  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Vector operator*(const Matrix& a, const Vector& x);
  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix outer(const Vector& b, const Vector& c);
double max_abs_diff(const Matrix& a, const Matrix& b);

double vector_norm(const Vector& x, NormKind norm);

/// Operator norm induced by `norm`. l1 and linf are exact; l2 is the square
/// root of the top eigenvalue of MᵀM, found by power iteration on repeated
/// squares of the Gram matrix.
double induced_norm(const Matrix& m, NormKind norm);

/// Unit vector x (in `norm`) with ‖Mx‖ = ‖M‖: a signed basis vector for
/// l1, a sign vector for linf, the top right singular vector for l2.
Vector maximizing_direction(const Matrix& m, NormKind norm);

/// min ‖Mx‖ over ‖x‖ = 1. Exactly zero when M is rank deficient at `rank_tol`.
double min_gain(const Matrix& m, NormKind norm, double rank_tol = 1e-9);

/// Numerical rank of the column set. A pivot counts when it exceeds
/// `tol` times the largest column (Euclidean) norm.
std::size_t rank(std::span<const Vector> columns, double tol = 1e-9);

/// Orthonormal basis (Euclidean) of span(columns), same threshold semantics
/// as rank().
std::vector<Vector> orthonormal_basis(std::span<const Vector> columns, double tol = 1e-9);

/// Inverse by Gauss-Jordan with partial pivoting; nullopt when singular at
/// relative pivot threshold `tol`.
std::optional<Matrix> inverse(const Matrix& m, double tol = 1e-12);

void require_square(const Matrix& m, std::string_view what);

}  // namespace peakbound
