#pragma once

// Finite matrix families and the product sets F_k built from F ∪ {I}.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "peakbound/linalg.hpp"

namespace peakbound {

/// Thrown when an enumeration would exceed the configured product cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultProductCap = 200000;
inline constexpr double kDefaultDedupTol = 1e-12;

/// kDefaultProductCap unless the PEAKBOUND_CAP environment variable holds a
/// positive integer.
std::size_t default_product_cap();

class MatrixFamily {
 public:
  MatrixFamily() = default;
  explicit MatrixFamily(std::vector<Matrix> members, std::vector<std::string> labels = {});

  std::size_t size() const { return members_.size(); }
  std::size_t dim() const { return members_.front().rows(); }
  const Matrix& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Matrix>& members() const { return members_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Copy without exact duplicate members (first occurrence kept).
  MatrixFamily without_duplicates() const;

  bool operator==(const MatrixFamily& other) const = default;

 private:
  std::vector<Matrix> members_;
  std::vector<std::string> labels_;
};

/// Member indices (0-based) in application order: {i1, i2, ..., ik} denotes
/// A_ik ⋯ A_i2 A_i1, so i1 acts first. Empty word = identity.
struct ProductWord {
  std::vector<std::size_t> indices;

  std::size_t length() const { return indices.size(); }
  /// Word that applies `this` first, then `then`.
  ProductWord followed_by(const ProductWord& then) const;
  bool operator==(const ProductWord& other) const = default;
};

Matrix evaluate(const MatrixFamily& family, const ProductWord& word);

struct ProductItem {
  ProductWord word;
  Matrix matrix;
};

class ProductSet {
 public:
  ProductSet(std::vector<ProductItem> items, std::size_t depth, double dedup_tol, std::size_t generated)
      : items_(std::move(items)), depth_(depth), dedup_tol_(dedup_tol), generated_(generated) {}

  const std::vector<ProductItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t depth() const { return depth_; }
  double dedup_tol() const { return dedup_tol_; }
  /// Number of candidate products formed before deduplication.
  std::size_t generated() const { return generated_; }
  std::size_t dim() const { return items_.front().matrix.rows(); }

  /// max over items of induced_norm(item, norm).
  double max_norm(NormKind norm) const;

 private:
  std::vector<ProductItem> items_;
  std::size_t depth_;
  double dedup_tol_;
  std::size_t generated_;
};

/// Breadth-first enumeration of all products with at most k factors, one
/// representative per distinct matrix (max-entrywise difference ≤ dedup_tol).
/// Representatives carry the first (shortest) word that reached them.
ProductSet enumerate_products(const MatrixFamily& family, std::size_t k, double dedup_tol = kDefaultDedupTol,
                              std::size_t cap = default_product_cap());

/// {Lx : L ∈ P}, in item order.
std::vector<Vector> orbit(const ProductSet& products, const Vector& x);

/// Smallest recorded word length among items equal to `target` within tol.
std::optional<std::size_t> minimal_length(const ProductSet& products, const Matrix& target, double tol = 1e-12);

}  // namespace peakbound
