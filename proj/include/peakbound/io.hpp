#pragma once

// Model files (JSON, schema v1), report helpers and the built-in fixtures.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "peakbound/desync.hpp"
#include "peakbound/linalg.hpp"
#include "peakbound/semigroup.hpp"

namespace peakbound {

inline constexpr const char* kSchemaVersion = "v1";
inline constexpr const char* kToolVersion = "0.1.0";

enum class FeedbackMode { pair, circle, closed_loop };

/// pair: {A, bcᵀ}; circle: {A − γbcᵀ, A + γbcᵀ}; closed_loop: {A + γbcᵀ}.
struct FeedbackBlock {
  Vector b;
  Vector c;
  double gamma = 1.0;
  FeedbackMode mode = FeedbackMode::pair;
  bool operator==(const FeedbackBlock&) const = default;
};

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::round_robin;
  /// 0-based in memory, 1-based in files.
  std::vector<std::size_t> indices;
  std::uint64_t seed = 0;
  bool operator==(const ScheduleSpec&) const = default;
};

struct ModelFile {
  std::string schema = kSchemaVersion;
  std::string name;
  /// Explicit members; takes precedence over `base`.
  std::vector<Matrix> family;
  std::optional<Matrix> base;
  /// Family = the mixtures of `base`.
  bool mixtures = false;
  NormKind norm = NormKind::l1;
  std::optional<FeedbackBlock> feedback;
  std::optional<ScheduleSpec> schedule;
  /// Scan direction: one matrix per explicit member, or one for `base`.
  std::vector<Matrix> perturbation;
  std::string notes;
  bool operator==(const ModelFile&) const = default;
};

ModelFile parse_model(const nlohmann::json& j);
ModelFile parse_model_text(const std::string& text);
ModelFile load_model(const std::string& path);
nlohmann::json to_json(const ModelFile& model);

/// The analysed family at perturbation size τ (τ = 0 gives the model itself).
MatrixFamily resolve_family(const ModelFile& model, double tau = 0.0);
/// The matrix whose mixtures are analysed; InputError when the model has none.
const Matrix& require_base(const ModelFile& model);
Schedule resolve_schedule(const ModelFile& model, std::size_t n);

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const Vector& v);
/// 1-based indices.
nlohmann::json word_json(const ProductWord& w);
/// {"value": v, "method": method}; null value when v is not finite.
nlohmann::json tagged(double value, const std::string& method);

/// Fixture parameters: "a", "eps" for E0, "m" for limexp and unbounded_peaks.
using FixtureArgs = std::map<std::string, double>;
std::vector<std::string> fixture_names();
/// InputError for unknown names or invalid parameters.
ModelFile make_fixture(const std::string& name, const FixtureArgs& args = {});

}  // namespace peakbound
