#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "bracketgeo/config.hpp"
#include "bracketgeo/error.hpp"
#include "bracketgeo/geometry.hpp"
#include "bracketgeo/manifolds.hpp"

using namespace bracketgeo;
using nlohmann::json;

namespace {

const std::string kData = BRACKETGEO_TEST_DATA;

json load(const std::string& name) {
  std::ifstream in(kData + "/" + name);
  return json::parse(in);
}

std::string error_of(const json& doc) {
  try {
    manifold_from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("builtin selector with numeric and string parameters") {
  const auto mf = manifold_from_json(json::parse(R"({"manifold": {"builtin": "sphere", "params": {"r": 2}}})"));
  CHECK(mf.name == "sphere");
  CHECK(scalar_curvature(ConnectionContext(mf, std::vector<double>{1.0, 1.0})) == doctest::Approx(0.5));
  const auto t = manifold_from_json(json::parse(R"({"manifold": {"builtin": "torus", "params": {"R": "3", "r": 0.25}}})"));
  CHECK(t.embedding[2].eval(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.25 * std::sin(1.0)));
  CHECK_THROWS_WITH_AS(manifold_from_json(json::parse(R"({"manifold": {"builtin": "nosuch"}})")), doctest::Contains("unknown manifold"), ConfigError);
}

TEST_CASE("custom sphere reproduces the builtin") {
  const auto mf = from_config(load("sphere_custom.json"));
  CHECK(mf.name == "unit sphere");
  CHECK(mf.n == 2);
  CHECK(mf.m == 3);
  CHECK(mf.domain.margin == 0.2);
  REQUIRE(mf.normals.has_value());
  const auto ref = builtin("sphere");
  for (const auto& u : sample_points(mf.domain, 5, 3)) {
    const ConnectionContext a(mf, u), b(ref, u);
    CHECK(scalar_curvature(a) == doctest::Approx(scalar_curvature(b)).epsilon(1e-13));
    const auto da = a.frame().d_values(), db = b.frame().d_values();
    for (std::size_t q = 0; q < da.size(); ++q) CHECK(da[q] == doctest::Approx(db[q]).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("missing and malformed keys are named") {
  json doc = load("sphere_custom.json");
  doc["manifold"]["custom"].erase("embedding");
  CHECK(error_of(doc) == "missing key 'manifold.custom.embedding'");

  doc = load("sphere_custom.json");
  doc["manifold"]["custom"].erase("bracket");
  CHECK(error_of(doc) == "missing key 'manifold.custom.bracket'");

  doc = load("sphere_custom.json");
  doc["manifold"]["custom"]["ambient"]["diagonal"] = json::array({1, 1});
  CHECK(error_of(doc).find("manifold.custom.ambient.diagonal") != std::string::npos);

  doc = load("sphere_custom.json");
  doc["manifold"]["custom"]["embedding"][1] = "sin(u1)*sin(u2";
  const std::string msg = error_of(doc);
  CHECK(msg.find("manifold.custom.embedding") != std::string::npos);
  CHECK(msg.find("offset") != std::string::npos);

  doc = load("sphere_custom.json");
  doc["manifold"]["custom"]["embedding"][0] = "u3";
  CHECK(error_of(doc).find("offset 0") != std::string::npos);

  CHECK(error_of(json::parse(R"({"manifold": {}})")) == "missing key 'manifold.builtin' or 'manifold.custom'");
  CHECK(error_of(json::parse(R"({"shape": {}})")) == "missing key 'manifold'");
}

TEST_CASE("ambient coordinates are allowed in normals but not in the embedding") {
  json doc = load("sphere_custom.json");
  doc["manifold"]["custom"]["normals"] = json::array({json::array({"x1", "x2", "x3 + 0*u1"})});
  CHECK_NOTHROW(manifold_from_json(doc));
  doc["manifold"]["custom"]["embedding"][0] = "x1";
  CHECK_FALSE(error_of(doc).empty());
}

TEST_CASE("multivector entries use 1-based chart indices") {
  const auto mf = manifold_from_json(json::parse(R"J({"manifold": {"custom": {
    "n": 3, "m": 4, "embedding": ["sin(u1)*sin(u2)*cos(u3)", "sin(u1)*sin(u2)*sin(u3)", "sin(u1)*cos(u2)", "cos(u1)"],
    "ambient": {"diagonal": [1, 1, 1, 1]},
    "bracket": {"multivector": {"arity": 3, "entries": [{"index": [1, 2, 3], "value": "1/(sin(u1)^2*sin(u2))"}], "antisymmetric": true}},
    "domain": {"box": [[0, 3.14159], [0, 3.14159], [0, 6.28318]]}}}})J"));
  CHECK(mf.bracket.arity() == 3);
  CHECK(mf.bracket.antisymmetric());
  CHECK(scalar_curvature(ConnectionContext(mf, std::vector<double>{1.0, 1.2, 0.4})) == doctest::Approx(6.0).epsilon(1e-10));

  json bad = json::parse(R"J({"manifold": {"custom": {
    "n": 2, "m": 3, "embedding": ["sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "cos(u1)"],
    "ambient": {"diagonal": [1, 1, 1]},
    "bracket": {"multivector": {"arity": 2, "entries": [{"index": [0, 1], "value": "1"}], "antisymmetric": true}},
    "domain": {"box": [[0, 3.14159], [0, 6.28318]]}}}})J");
  CHECK(error_of(bad).find("must lie in 1..2") != std::string::npos);
}

TEST_CASE("structure validation rejects incompatible brackets") {
  const json doc = load("distorted_s2xs2.json");
  try {
    from_config(doc);
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("compatibility") != std::string::npos);
    CHECK(msg.find("worst point") != std::string::npos);
    CHECK(msg.find("--force") != std::string::npos);
  }
  ConfigOptions forced;
  forced.force = true;
  CHECK_NOTHROW(from_config(doc, forced));

  json asym = load("sphere_custom.json");
  asym["manifold"]["custom"]["bracket"]["poisson"]["theta"][1][0] = "1/sin(u1)";
  CHECK_THROWS_WITH_AS(from_config(asym), doctest::Contains("not antisymmetric"), ConfigError);
}

TEST_CASE("config files") {
  CHECK_NOTHROW(load_config(kData + "/sphere_custom.json"));
  CHECK_THROWS_WITH_AS(load_config(kData + "/does_not_exist.json"), doctest::Contains("cannot open"), ConfigError);
  const std::string broken = "broken_config_test.json";
  std::ofstream(broken) << "{\"manifold\": ";
  CHECK_THROWS_WITH_AS(load_config(broken), doctest::Contains("not valid JSON"), ConfigError);
  std::remove(broken.c_str());
}
