#include "peakbound/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace peakbound {

std::string to_string(NormKind norm) {
  switch (norm) {
    case NormKind::l1: return "l1";
    case NormKind::l2: return "l2";
    case NormKind::linf: return "linf";
  }
  return "l1";
}

NormKind parse_norm(std::string_view text) {
  if (text == "l1" || text == "ell1") return NormKind::l1;
  if (text == "l2" || text == "ell2") return NormKind::l2;
  if (text == "linf" || text == "ellinf") return NormKind::linf;
  throw InputError("unknown norm '" + std::string(text) + "' (expected l1, l2 or linf)");
}

// ---------------------------------------------------------------- Vector

Vector::Vector(std::size_t dim, double fill) : values_(dim, fill) {}
Vector::Vector(std::initializer_list<double> values) : values_(values) {}
Vector::Vector(std::vector<double> values) : values_(std::move(values)) {}

Vector Vector::basis(std::size_t dim, std::size_t index) {
  Vector e(dim);
  e[index] = 1.0;
  return e;
}

bool Vector::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

bool Vector::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Vector& Vector::operator+=(const Vector& other) {
  if (other.dim() != dim()) throw InputError("vector dimension mismatch");
  for (std::size_t i = 0; i < dim(); ++i) values_[i] += other.values_[i];
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  if (other.dim() != dim()) throw InputError("vector dimension mismatch");
  for (std::size_t i = 0; i < dim(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Vector& Vector::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

double dot(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw InputError("vector dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InputError("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw InputError("matrix must have at least one row and column");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw InputError("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Matrix Matrix::from_columns(std::span<const Vector> columns) {
  if (columns.empty()) throw InputError("no columns");
  Matrix m(columns.front().dim(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].dim() != m.rows_) throw InputError("column dimension mismatch");
    for (std::size_t r = 0; r < m.rows_; ++r) m(r, c) = columns[c][r];
  }
  return m;
}

Vector Matrix::row(std::size_t r) const {
  Vector v(cols_);
  for (std::size_t c = 0; c < cols_; ++c) v[c] = (*this)(r, c);
  return v;
}

Vector Matrix::column(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_, std::vector<double>(cols_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out[r][c] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) throw InputError("matrix dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) throw InputError("matrix dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw InputError("matrix product dimension mismatch");
  Matrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

Vector operator*(const Matrix& a, const Vector& x) {
  if (a.cols_ != x.dim()) throw InputError("matrix-vector dimension mismatch");
  Vector out(a.rows_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols_; ++k) s += a(i, k) * x[k];
    out[i] = s;
  }
  return out;
}

Matrix outer(const Vector& b, const Vector& c) {
  Matrix m(b.dim(), c.dim());
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = 0; j < c.dim(); ++j) m(i, j) = b[i] * c[j];
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("matrix dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

void require_square(const Matrix& m, std::string_view what) {
  if (!m.is_square() || m.rows() == 0)
    throw InputError(std::string(what) + ": matrix must be square and non-empty");
}

// ---------------------------------------------------------------- norms

double vector_norm(const Vector& x, NormKind norm) {
  double s = 0.0;
  switch (norm) {
    case NormKind::l1:
      for (double v : x.values()) s += std::abs(v);
      return s;
    case NormKind::l2: {
      // Scaled to avoid overflow on long expanding trajectories.
      double scale = 0.0;
      for (double v : x.values()) scale = std::max(scale, std::abs(v));
      if (scale == 0.0) return 0.0;
      for (double v : x.values()) s += (v / scale) * (v / scale);
      return scale * std::sqrt(s);
    }
    case NormKind::linf:
      for (double v : x.values()) s = std::max(s, std::abs(v));
      return s;
  }
  return s;
}

namespace {

struct SpectralPair {
  double norm = 0.0;
  Vector direction;
};

SpectralPair spectral_pair(const Matrix& m) {
  const Matrix gram = m.transpose() * m;
  const std::size_t n = gram.rows();
  double scale = 0.0;
  for (double v : gram.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return {0.0, Vector::basis(n, 0)};

  // Repeated squaring suppresses every eigenvalue below the top one, so a
  // column of the squared matrix is already an accurate dominant direction.
  Matrix h = gram * (1.0 / scale);
  for (int s = 0; s < 64; ++s) {
    h = h * h;
    double mx = 0.0;
    for (double v : h.data()) mx = std::max(mx, std::abs(v));
    if (mx == 0.0) break;
    h *= 1.0 / mx;
  }
  std::size_t best = 0;
  double best_norm = -1.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double cn = vector_norm(h.column(c), NormKind::l2);
    if (cn > best_norm) {
      best_norm = cn;
      best = c;
    }
  }
  Vector v = best_norm > 0.0 ? h.column(best) : Vector(n, 1.0);
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    v *= 1.0 / vector_norm(v, NormKind::l2);
    const Vector gv = gram * v;
    const double next = dot(v, gv);
    const bool settled = it > 0 && std::abs(next - lambda) <= 1e-15 * std::abs(next);
    lambda = next;
    if (settled || vector_norm(gv, NormKind::l2) == 0.0) break;
    v = gv;
  }
  v *= 1.0 / vector_norm(v, NormKind::l2);
  return {std::sqrt(std::max(lambda, 0.0)), v};
}

}  // namespace

double induced_norm(const Matrix& m, NormKind norm) {
  require_square(m, "induced_norm");
  const std::size_t n = m.rows();
  double best = 0.0;
  switch (norm) {
    case NormKind::l1:
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += std::abs(m(r, c));
        best = std::max(best, s);
      }
      return best;
    case NormKind::linf:
      for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) s += std::abs(m(r, c));
        best = std::max(best, s);
      }
      return best;
    case NormKind::l2:
      return spectral_pair(m).norm;
  }
  return best;
}

Vector maximizing_direction(const Matrix& m, NormKind norm) {
  require_square(m, "maximizing_direction");
  const std::size_t n = m.rows();
  switch (norm) {
    case NormKind::l1: {
      std::size_t best = 0;
      double best_sum = -1.0;
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += std::abs(m(r, c));
        if (s > best_sum) {
          best_sum = s;
          best = c;
        }
      }
      return Vector::basis(n, best);
    }
    case NormKind::linf: {
      std::size_t best = 0;
      double best_sum = -1.0;
      for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < n; ++c) s += std::abs(m(r, c));
        if (s > best_sum) {
          best_sum = s;
          best = r;
        }
      }
      Vector x(n);
      for (std::size_t c = 0; c < n; ++c) x[c] = m(best, c) < 0.0 ? -1.0 : 1.0;
      return x;
    }
    case NormKind::l2:
      return spectral_pair(m).direction;
  }
  return Vector::basis(n, 0);
}

double min_gain(const Matrix& m, NormKind norm, double rank_tol) {
  require_square(m, "min_gain");
  std::vector<Vector> cols;
  for (std::size_t c = 0; c < m.cols(); ++c) cols.push_back(m.column(c));
  if (rank(cols, rank_tol) < m.rows()) return 0.0;
  const auto inv = inverse(m);
  if (!inv) return 0.0;
  return 1.0 / induced_norm(*inv, norm);
}

// ---------------------------------------------------------------- rank

std::vector<Vector> orthonormal_basis(std::span<const Vector> columns, double tol) {
  if (columns.empty()) return {};
  const std::size_t dim = columns.front().dim();
  double largest = 0.0;
  for (const Vector& c : columns) {
    if (c.dim() != dim) throw InputError("rank: vectors of different dimension");
    largest = std::max(largest, vector_norm(c, NormKind::l2));
  }
  std::vector<Vector> basis;
  if (largest == 0.0) return basis;
  const double threshold = tol * largest;

  std::vector<Vector> residual(columns.begin(), columns.end());
  std::vector<bool> used(residual.size(), false);
  while (basis.size() < dim) {
    std::size_t pivot = residual.size();
    double pivot_norm = threshold;
    for (std::size_t j = 0; j < residual.size(); ++j) {
      if (used[j]) continue;
      const double rn = vector_norm(residual[j], NormKind::l2);
      if (rn > pivot_norm) {
        pivot_norm = rn;
        pivot = j;
      }
    }
    if (pivot == residual.size()) break;
    used[pivot] = true;
    Vector q = residual[pivot] * (1.0 / pivot_norm);
    // Second pass restores orthogonality lost to cancellation.
    for (const Vector& b : basis) q -= b * dot(b, q);
    q *= 1.0 / vector_norm(q, NormKind::l2);
    for (std::size_t j = 0; j < residual.size(); ++j)
      if (!used[j]) residual[j] -= q * dot(q, residual[j]);
    basis.push_back(std::move(q));
  }
  return basis;
}

std::size_t rank(std::span<const Vector> columns, double tol) {
  return orthonormal_basis(columns, tol).size();
}

std::optional<Matrix> inverse(const Matrix& m, double tol) {
  require_square(m, "inverse");
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  double scale = 0.0;
  for (double v : m.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return std::nullopt;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) <= tol * scale) return std::nullopt;
    if (piv != col)
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a(piv, c), a(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    const double d = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= d;
      inv(col, c) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

}  // namespace peakbound
