#include "peakbound/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace peakbound {

using nlohmann::json;

namespace {

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw InputError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(what + " must be finite");
  return v;
}

Vector parse_vector(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + " must be a non-empty array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], what + " entry");
  return v;
}

Matrix parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + " must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const json& r : j) rows.push_back(parse_vector(r, what + " row").raw());
  Matrix m = Matrix::from_rows(rows);
  if (!m.is_square()) throw InputError(what + " must be square");
  return m;
}

std::vector<Matrix> parse_matrices(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + " must be a non-empty array of matrices");
  std::vector<Matrix> out;
  for (const json& m : j) out.push_back(parse_matrix(m, what + " member"));
  return out;
}

std::string mode_name(FeedbackMode m) {
  switch (m) {
    case FeedbackMode::pair: return "pair";
    case FeedbackMode::circle: return "circle";
    case FeedbackMode::closed_loop: return "closed_loop";
  }
  return "pair";
}

FeedbackMode parse_mode(const std::string& s) {
  if (s == "pair") return FeedbackMode::pair;
  if (s == "circle") return FeedbackMode::circle;
  if (s == "closed_loop") return FeedbackMode::closed_loop;
  throw InputError("feedback mode must be pair, circle or closed_loop");
}

std::string kind_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::explicit_list: return "explicit";
    case ScheduleKind::round_robin: return "round_robin";
    case ScheduleKind::random: return "random";
  }
  return "round_robin";
}

std::size_t model_dim(const ModelFile& m) { return m.family.empty() ? m.base->rows() : m.family.front().rows(); }

void validate(const ModelFile& m) {
  if (m.schema != kSchemaVersion) throw InputError("unsupported schema version '" + m.schema + "'");
  if (m.family.empty() && !m.base) throw InputError("model needs a family or a base matrix");
  const std::size_t n = model_dim(m);
  for (const Matrix& a : m.family)
    if (a.rows() != n) throw InputError("family members differ in size");
  if (m.base && m.base->rows() != n) throw InputError("base matrix size differs from the family");
  if (m.mixtures && !m.base) throw InputError("mixtures directive needs a base matrix");
  if (m.feedback) {
    if (!m.base) throw InputError("feedback block needs a base matrix");
    if (m.feedback->b.dim() != n || m.feedback->c.dim() != n) throw InputError("feedback b and c must have dimension N");
  }
  if (!m.perturbation.empty()) {
    const std::size_t want = m.family.empty() ? 1 : m.family.size();
    if (m.perturbation.size() != want)
      throw InputError("perturbation needs " + std::to_string(want) + " matrices");
    for (const Matrix& e : m.perturbation)
      if (e.rows() != n) throw InputError("perturbation matrix size differs from the family");
  }
  if (m.schedule && m.schedule->kind == ScheduleKind::explicit_list)
    for (std::size_t i : m.schedule->indices)
      if (i >= n) throw InputError("schedule index out of range 1..N");
}

}  // namespace

json to_json(const Matrix& m) { return m.to_rows(); }
json to_json(const Vector& v) { return v.raw(); }

json word_json(const ProductWord& w) {
  json out = json::array();
  for (std::size_t i : w.indices) out.push_back(i + 1);
  return out;
}

json tagged(double value, const std::string& method) {
  json out;
  out["value"] = std::isfinite(value) ? json(value) : json(nullptr);
  out["method"] = method;
  return out;
}

ModelFile parse_model(const json& j) {
  if (!j.is_object()) throw InputError("model must be a JSON object");
  ModelFile m;
  if (!j.contains("schema") || !j["schema"].is_string()) throw InputError("model needs a \"schema\" string");
  m.schema = j["schema"].get<std::string>();
  if (j.contains("name")) m.name = j["name"].get<std::string>();
  if (j.contains("notes")) m.notes = j["notes"].get<std::string>();
  if (j.contains("family")) m.family = parse_matrices(j["family"], "family");
  if (j.contains("base")) m.base = parse_matrix(j["base"], "base");
  if (j.contains("mixtures")) {
    if (!j["mixtures"].is_boolean()) throw InputError("mixtures must be true or false");
    m.mixtures = j["mixtures"].get<bool>();
  }
  if (j.contains("norm")) m.norm = parse_norm(j["norm"].get<std::string>());
  if (j.contains("feedback")) {
    const json& f = j["feedback"];
    if (!f.is_object()) throw InputError("feedback must be an object");
    FeedbackBlock fb;
    fb.b = parse_vector(f.at("b"), "feedback b");
    fb.c = parse_vector(f.at("c"), "feedback c");
    if (f.contains("gamma")) fb.gamma = number(f["gamma"], "feedback gamma");
    if (f.contains("mode")) fb.mode = parse_mode(f["mode"].get<std::string>());
    m.feedback = fb;
  }
  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    if (!s.is_object() || !s.contains("kind")) throw InputError("schedule must be an object with a kind");
    ScheduleSpec spec;
    const std::string kind = s["kind"].get<std::string>();
    if (kind == "explicit") {
      spec.kind = ScheduleKind::explicit_list;
      for (const json& i : s.at("indices")) {
        if (!i.is_number_integer() || i.get<long long>() < 1) throw InputError("schedule indices are integers in 1..N");
        spec.indices.push_back(static_cast<std::size_t>(i.get<long long>() - 1));
      }
    } else if (kind == "round_robin") {
      spec.kind = ScheduleKind::round_robin;
    } else if (kind == "random") {
      spec.kind = ScheduleKind::random;
      if (s.contains("seed")) spec.seed = s["seed"].get<std::uint64_t>();
    } else {
      throw InputError("schedule kind must be explicit, round_robin or random");
    }
    m.schedule = spec;
  }
  if (j.contains("perturbation")) m.perturbation = parse_matrices(j["perturbation"], "perturbation");
  validate(m);
  return m;
}

ModelFile parse_model_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_model(j);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid model: ") + e.what());
  }
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str());
}

json to_json(const ModelFile& m) {
  json j;
  j["schema"] = m.schema;
  if (!m.name.empty()) j["name"] = m.name;
  if (!m.family.empty()) {
    j["family"] = json::array();
    for (const Matrix& a : m.family) j["family"].push_back(to_json(a));
  }
  if (m.base) j["base"] = to_json(*m.base);
  if (m.mixtures) j["mixtures"] = true;
  j["norm"] = to_string(m.norm);
  if (m.feedback) {
    j["feedback"] = {{"b", to_json(m.feedback->b)},
                     {"c", to_json(m.feedback->c)},
                     {"gamma", m.feedback->gamma},
                     {"mode", mode_name(m.feedback->mode)}};
  }
  if (m.schedule) {
    json s;
    s["kind"] = kind_name(m.schedule->kind);
    if (m.schedule->kind == ScheduleKind::explicit_list) {
      s["indices"] = json::array();
      for (std::size_t i : m.schedule->indices) s["indices"].push_back(i + 1);
    }
    if (m.schedule->kind == ScheduleKind::random) s["seed"] = m.schedule->seed;
    j["schedule"] = s;
  }
  if (!m.perturbation.empty()) {
    j["perturbation"] = json::array();
    for (const Matrix& e : m.perturbation) j["perturbation"].push_back(to_json(e));
  }
  if (!m.notes.empty()) j["notes"] = m.notes;
  return j;
}

const Matrix& require_base(const ModelFile& model) {
  if (!model.base) throw InputError("this command needs a model with a base matrix");
  return *model.base;
}

MatrixFamily resolve_family(const ModelFile& model, double tau) {
  validate(model);
  const bool shifted = tau != 0.0 && !model.perturbation.empty();
  if (tau != 0.0 && model.perturbation.empty()) throw InputError("model has no perturbation direction");
  if (!model.family.empty()) {
    std::vector<Matrix> members = model.family;
    if (shifted)
      for (std::size_t i = 0; i < members.size(); ++i) members[i] += model.perturbation[i] * tau;
    return MatrixFamily(std::move(members));
  }
  Matrix a = *model.base;
  if (shifted) a += model.perturbation.front() * tau;
  if (model.mixtures) return mixtures(a).members;
  if (model.feedback) {
    const FeedbackBlock& f = *model.feedback;
    const Matrix k = outer(f.b, f.c) * f.gamma;
    switch (f.mode) {
      case FeedbackMode::pair: return MatrixFamily({a, outer(f.b, f.c)});
      case FeedbackMode::circle: return MatrixFamily({a - k, a + k}).without_duplicates();
      case FeedbackMode::closed_loop: return MatrixFamily({a + k});
    }
  }
  return MatrixFamily({a});
}

Schedule resolve_schedule(const ModelFile& model, std::size_t n) {
  if (!model.schedule) return Schedule::round_robin(n);
  switch (model.schedule->kind) {
    case ScheduleKind::explicit_list: return Schedule::explicit_list(model.schedule->indices, n);
    case ScheduleKind::round_robin: return Schedule::round_robin(n);
    case ScheduleKind::random: return Schedule::random(n, model.schedule->seed);
  }
  return Schedule::round_robin(n);
}

std::vector<std::string> fixture_names() {
  return {"E0",          "limexp", "unbounded_peaks", "identity2",     "shear", "mixtures_sym_half",
          "rot2",        "shear_rot", "half_identity", "kalman_pair"};
}

ModelFile make_fixture(const std::string& name, const FixtureArgs& args) {
  auto arg = [&](const std::string& key, double fallback) {
    const auto it = args.find(key);
    return it == args.end() ? fallback : it->second;
  };
  ModelFile m;
  m.name = name;
  const Matrix shear{{1.0, 1.0}, {0.0, 1.0}};
  const Matrix r90{{0.0, -1.0}, {1.0, 0.0}};
  if (name == "E0") {
    const double a = arg("a", 0.5);
    const double eps = arg("eps", 0.1);
    if (eps == 0.0 || !std::isfinite(a) || !std::isfinite(eps)) throw InputError("E0 needs finite a and nonzero eps");
    m.base = Matrix{{a, eps}, {eps, a}};
    m.feedback = FeedbackBlock{Vector{-2.0 * a, -(a * a + eps * eps) / eps}, Vector{1.0, 0.0}, 1.0,
                               FeedbackMode::closed_loop};
    m.notes =
        "closed loop x(n+1) = (A + b e1^T) x(n) = [[-a, eps], [-a^2/eps, a]] x(n), nilpotent; the variant "
        "with +a^2/eps in the lower-left corner is not nilpotent";
  } else if (name == "limexp" || name == "unbounded_peaks") {
    const double mm = arg("m", 2.0);
    if (!(mm >= 1.0)) throw InputError(name + " needs m >= 1");
    m.family = name == "limexp" ? std::vector<Matrix>{Matrix{{1.0 - 1.0 / mm, 1.0}, {0.0, 1.0 - 1.0 / mm}}}
                                : std::vector<Matrix>{Matrix{{1.0 - 1.0 / (mm * mm), 1.0 / mm},
                                                             {0.0, 1.0 - 1.0 / (mm * mm)}}};
  } else if (name == "identity2") {
    m.family = {Matrix::identity(2)};
  } else if (name == "shear") {
    m.family = {shear};
  } else if (name == "mixtures_sym_half") {
    m.base = Matrix{{0.0, 0.5}, {0.5, 0.0}};
    m.mixtures = true;
    m.schedule = ScheduleSpec{ScheduleKind::random, {}, 1};
    m.perturbation = {Matrix{{0.3, -0.2}, {0.1, 0.4}}};
  } else if (name == "rot2") {
    m.family = {r90 * 2.0};
    m.norm = NormKind::l2;
  } else if (name == "shear_rot") {
    m.family = {shear, r90};
    m.perturbation = {Matrix{{0.1, 0.0}, {0.0, 0.1}}, Matrix{{0.0, 0.1}, {0.0, 0.0}}};
  } else if (name == "half_identity") {
    m.family = {Matrix::identity(2) * 0.5};
  } else if (name == "kalman_pair") {
    m.base = Matrix{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.2, -0.3, 0.5}};
    m.feedback = FeedbackBlock{Vector{0.0, 0.0, 1.0}, Vector{1.0, 0.0, 0.0}, 1.0, FeedbackMode::pair};
  } else {
    throw InputError("unknown fixture '" + name + "'");
  }
  validate(m);
  return m;
}

}  // namespace peakbound
