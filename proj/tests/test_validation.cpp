#include <doctest.h>

#include <cmath>

#include "bracketgeo/config.hpp"
#include "bracketgeo/geometry.hpp"
#include "bracketgeo/manifolds.hpp"
#include "bracketgeo/validation.hpp"

using namespace bracketgeo;

namespace {

EmbeddedManifold sphere_with_theta(const char* theta) {
  nlohmann::json doc = nlohmann::json::parse(R"J({"manifold": {"custom": {
    "n": 2, "m": 3, "embedding": ["sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "cos(u1)"],
    "ambient": {"diagonal": [1, 1, 1]},
    "bracket": {"poisson": {"theta": [["0", "T"], ["-(T)", "0"]]}},
    "domain": {"box": [[0, 3.14159], [0, 6.28318]]}}}})J");
  auto& th = doc["manifold"]["custom"]["bracket"]["poisson"]["theta"];
  th[0][1] = theta;
  th[1][0] = std::string("-(") + theta + ")";
  return manifold_from_json(doc);
}

}  // namespace

TEST_CASE("all builtins satisfy the compatibility condition") {
  for (const auto& info : builtin_registry()) {
    INFO(info.name);
    const auto mf = builtin(info.name);
    const auto report = validate_structure(mf, sample_points(mf.domain, 10, 42));
    CHECK(report.points == 10);
    CHECK(report.degenerate == 0);
    CHECK(report.worst.compatibility < 1e-10);
    CHECK(report.worst.antisymmetry == 0.0);
    if (mf.bracket.arity() == 2) {
      REQUIRE(report.worst.jacobi.has_value());
      CHECK(*report.worst.jacobi < 1e-10);
      REQUIRE(report.worst.j_square.has_value());
      CHECK(*report.worst.j_square < 1e-10);
    } else {
      CHECK_FALSE(report.worst.jacobi.has_value());
      CHECK_FALSE(report.worst.j_square.has_value());
    }
    if (report.worst.divergence_free) CHECK(*report.worst.divergence_free < 1e-10);
  }
}

TEST_CASE("every 2-dimensional structure is compatible") {
  // gamma^2 is g-trace invariant in two dimensions, so any nonvanishing
  // theta^{12} passes; only the scale changes.
  for (const char* theta : {"1 + u1^2", "exp(u2)", "1/sin(u1)"}) {
    INFO(theta);
    const auto mf = sphere_with_theta(theta);
    CHECK(validate_structure(mf, sample_points(mf.domain, 10, 1)).worst.compatibility < 1e-10);
  }
}

TEST_CASE("para-Kaehler plane squares to the identity") {
  const auto mf = builtin("para_plane");
  const auto c = check_structure_at(mf, std::vector<double>{0.1, 0.2});
  REQUIRE(c.j_square.has_value());
  CHECK(*c.j_square < 1e-14);
  CHECK(ConnectionContext(mf, std::vector<double>{0.1, 0.2}).frame().epsilon() == -1);
}

TEST_CASE("distorted product structure is rejected and breaks D commutation") {
  const auto mf = distorted_s2xs2();
  const auto report = validate_structure(mf, sample_points(mf.domain, 10, 42));
  CHECK(report.worst.compatibility > 0.1);
  REQUIRE(report.worst.jacobi.has_value());
  CHECK(*report.worst.jacobi < 1e-12);
  double worst = 0;
  for (const auto& u : sample_points(mf.domain, 10, 42)) {
    const ConnectionContext ctx(mf, u);
    const Jet f = ctx.frame().x()[0] * ctx.frame().x()[3];
    worst = std::max(worst, d_commutator(ctx, f).residual);
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("Jacobi identity failure is detected") {
  const auto mf = manifold_from_json(nlohmann::json::parse(R"J({"manifold": {"custom": {
    "n": 3, "m": 4, "embedding": ["cos(u1)", "sin(u1)", "u2", "u3"],
    "ambient": {"diagonal": [1, 1, 1, 1]},
    "bracket": {"poisson": {"theta": [["0", "1", "0"], ["-1", "0", "u2"], ["0", "-u2", "0"]]}},
    "domain": {"box": [[0, 3], [0, 1], [0, 1]]}}}})J"));
  const auto c = check_structure_at(mf, std::vector<double>{1.0, 0.5, 0.5});
  REQUIRE(c.jacobi.has_value());
  CHECK(*c.jacobi > 0.5);
}

TEST_CASE("degenerate points are counted and skipped") {
  const auto mf = sphere_with_theta("u1 - 1");
  const std::vector<ChartPoint> pts{{1.0, 0.3}, {2.0, 0.3}};
  const auto report = validate_structure(mf, pts);
  CHECK(report.degenerate == 1);
  CHECK(report.points == 1);
}
