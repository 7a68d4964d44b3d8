#include <cmath>

#include "doctest.h"
#include "peakbound/io.hpp"

using namespace peakbound;

TEST_CASE("fixtures round-trip exactly") {
  for (const std::string& name : fixture_names()) {
    CAPTURE(name);
    const ModelFile m = make_fixture(name);
    CHECK(parse_model(to_json(m)) == m);
    CHECK(parse_model_text(to_json(m).dump()) == m);
    CHECK(resolve_family(m).size() >= 1);
  }
}

TEST_CASE("E0 closed loop is nilpotent") {
  const ModelFile m = make_fixture("E0", {{"a", 0.5}, {"eps", 0.1}});
  const MatrixFamily f = resolve_family(m);
  REQUIRE(f.size() == 1);
  const Matrix& a = f[0];
  double biggest = 0.0;
  for (double v : a.data()) biggest = std::max(biggest, std::abs(v));
  CHECK(biggest == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(max_abs_diff(a * a, Matrix(2, 2)) < 1e-12);
}

TEST_CASE("limit family fixtures") {
  const MatrixFamily e = resolve_family(make_fixture("limexp", {{"m", 2}}));
  CHECK(e[0] == Matrix({{0.5, 1}, {0, 0.5}}));
  const MatrixFamily f = resolve_family(make_fixture("unbounded_peaks", {{"m", 4}}));
  CHECK(f[0] == Matrix({{1 - 1.0 / 16, 0.25}, {0, 1 - 1.0 / 16}}));
  CHECK_THROWS_AS(make_fixture("nope"), InputError);
}

TEST_CASE("model parsing errors") {
  CHECK_THROWS_AS(parse_model_text("{"), InputError);
  CHECK_THROWS_AS(parse_model_text(R"({"schema":"v9","family":[[[1]]]})"), InputError);
  CHECK_THROWS_AS(parse_model_text(R"({"schema":"v1","family":[[[1,0],[0,1]],[[1]]]})"), InputError);
  CHECK_THROWS_AS(parse_model_text(R"({"schema":"v1","family":[[[1,0]]]})"), InputError);
  CHECK_THROWS_AS(parse_model_text(R"({"schema":"v1"})"), InputError);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), InputError);
}

TEST_CASE("schedule and mixture resolution") {
  const ModelFile m = make_fixture("mixtures_sym_half");
  CHECK(resolve_family(m).size() == 2);
  CHECK(resolve_schedule(m, 2).kind() == ScheduleKind::random);
  const MatrixFamily perturbed = resolve_family(m, 0.1);
  CHECK(perturbed[0](0, 0) == doctest::Approx(0.03));
  CHECK_THROWS_AS(require_base(make_fixture("shear_rot")), InputError);
}

TEST_CASE("report helpers") {
  CHECK(word_json(ProductWord{{0, 2}}) == nlohmann::json::array({1, 3}));
  CHECK(tagged(INFINITY, "estimate")["value"].is_null());
  CHECK(tagged(0.25, "certified")["method"] == "certified");
}
