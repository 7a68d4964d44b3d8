#include "peakbound/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <unordered_map>

namespace peakbound {

std::size_t default_product_cap() {
  if (const char* env = std::getenv("PEAKBOUND_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultProductCap;
}

MatrixFamily::MatrixFamily(std::vector<Matrix> members, std::vector<std::string> labels)
    : members_(std::move(members)), labels_(std::move(labels)) {
  if (members_.empty()) throw InputError("matrix family must have at least one member");
  const std::size_t n = members_.front().rows();
  for (const Matrix& m : members_) {
    require_square(m, "matrix family");
    if (m.rows() != n) throw InputError("matrix family members differ in size");
    if (!m.all_finite()) throw InputError("matrix family has non-finite entries");
  }
  if (!labels_.empty() && labels_.size() != members_.size())
    throw InputError("matrix family label count differs from member count");
}

MatrixFamily MatrixFamily::without_duplicates() const {
  std::vector<Matrix> kept;
  std::vector<std::string> kept_labels;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (std::find(kept.begin(), kept.end(), members_[i]) != kept.end()) continue;
    kept.push_back(members_[i]);
    if (!labels_.empty()) kept_labels.push_back(labels_[i]);
  }
  return MatrixFamily(std::move(kept), std::move(kept_labels));
}

ProductWord ProductWord::followed_by(const ProductWord& then) const {
  ProductWord w = *this;
  w.indices.insert(w.indices.end(), then.indices.begin(), then.indices.end());
  return w;
}

Matrix evaluate(const MatrixFamily& family, const ProductWord& word) {
  Matrix p = Matrix::identity(family.dim());
  for (std::size_t idx : word.indices) {
    if (idx >= family.size()) throw InputError("product word index out of range");
    p = family[idx] * p;
  }
  return p;
}

double ProductSet::max_norm(NormKind norm) const {
  double best = 0.0;
  for (const ProductItem& item : items_) best = std::max(best, induced_norm(item.matrix, norm));
  return best;
}

namespace {

// Buckets matrices by a quantized entry sum; matrices within dedup_tol of
// each other land in the same or an adjacent bucket.
class DedupIndex {
 public:
  DedupIndex(double tol, std::size_t n) : tol_(tol), width_(std::max(1e-6, 4.0 * tol * double(n * n))) {}

  std::optional<std::size_t> find(const Matrix& m, const std::vector<ProductItem>& items) const {
    const long long key = bucket(m);
    for (long long k = key - 1; k <= key + 1; ++k) {
      auto [lo, hi] = index_.equal_range(k);
      for (auto it = lo; it != hi; ++it)
        if (max_abs_diff(items[it->second].matrix, m) <= tol_) return it->second;
    }
    return std::nullopt;
  }

  void insert(const Matrix& m, std::size_t pos) { index_.emplace(bucket(m), pos); }

 private:
  long long bucket(const Matrix& m) const {
    double s = 0.0;
    for (double v : m.data()) s += v;
    return static_cast<long long>(std::floor(s / width_));
  }

  double tol_;
  double width_;
  std::unordered_multimap<long long, std::size_t> index_;
};

}  // namespace

ProductSet enumerate_products(const MatrixFamily& family, std::size_t k, double dedup_tol, std::size_t cap) {
  if (dedup_tol < 0.0) throw InputError("enumerate_products: dedup tolerance must be nonnegative");
  const std::size_t n = family.dim();
  std::vector<ProductItem> items;
  DedupIndex index(dedup_tol, n);
  items.push_back({ProductWord{}, Matrix::identity(n)});
  index.insert(items.back().matrix, 0);
  std::size_t generated = 1;

  std::vector<std::size_t> frontier{0};
  for (std::size_t level = 1; level <= k && !frontier.empty(); ++level) {
    std::vector<std::size_t> next;
    for (std::size_t pos : frontier) {
      for (std::size_t i = 0; i < family.size(); ++i) {
        if (++generated > cap)
          throw CapExceeded("product enumeration exceeded cap of " + std::to_string(cap) + " products at depth " +
                            std::to_string(level));
        Matrix candidate = family[i] * items[pos].matrix;
        if (!candidate.all_finite()) throw CapExceeded("product enumeration overflowed to non-finite entries");
        if (index.find(candidate, items)) continue;
        ProductWord word = items[pos].word;
        word.indices.push_back(i);
        index.insert(candidate, items.size());
        next.push_back(items.size());
        items.push_back({std::move(word), std::move(candidate)});
      }
    }
    frontier = std::move(next);
  }
  return ProductSet(std::move(items), k, dedup_tol, generated);
}

std::vector<Vector> orbit(const ProductSet& products, const Vector& x) {
  if (x.dim() != products.dim()) throw InputError("orbit: vector dimension mismatch");
  std::vector<Vector> out;
  out.reserve(products.size());
  for (const ProductItem& item : products.items()) out.push_back(item.matrix * x);
  return out;
}

std::optional<std::size_t> minimal_length(const ProductSet& products, const Matrix& target, double tol) {
  std::optional<std::size_t> best;
  for (const ProductItem& item : products.items()) {
    if (item.matrix.rows() != target.rows() || item.matrix.cols() != target.cols()) return std::nullopt;
    if (max_abs_diff(item.matrix, target) <= tol && (!best || item.word.length() < *best)) best = item.word.length();
  }
  return best;
}

}  // namespace peakbound
