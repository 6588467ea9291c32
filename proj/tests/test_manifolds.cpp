#include <doctest.h>

#include <cmath>
#include <set>

#include "bracketgeo/error.hpp"
#include "bracketgeo/geometry.hpp"
#include "bracketgeo/manifolds.hpp"
#include "support/surface.hpp"

using namespace bracketgeo;

TEST_CASE("registry lists the nine builtins with documented parameters") {
  std::set<std::string> names;
  for (const auto& info : builtin_registry()) {
    names.insert(info.name);
    CHECK_FALSE(info.summary.empty());
    for (const auto& p : info.params) CHECK_FALSE(p.description.empty());
  }
  CHECK(names == std::set<std::string>{"sphere", "sphere_nambu", "torus", "clifford_torus", "hyperbolic", "s2xs2", "indefinite_s2xs2", "para_plane", "s3_nambu"});
}

TEST_CASE("embeddings satisfy their defining equations") {
  auto quad = [](const std::vector<double>& x, std::initializer_list<double> signs, std::size_t from = 0) {
    double s = 0;
    std::size_t i = from;
    for (double sg : signs) s += sg * x[i] * x[i], ++i;
    return s;
  };
  for (const auto& u : sample_points(builtin("sphere").domain, 5, 1))
    CHECK(quad(fdtest::embed(builtin("sphere", {{"r", "2"}}), u), {1, 1, 1}) == doctest::Approx(4.0));
  for (const auto& u : sample_points(builtin("hyperbolic").domain, 5, 1)) CHECK(quad(fdtest::embed(builtin("hyperbolic"), u), {1, 1, -1}) == doctest::Approx(-1.0));
  for (const auto& u : sample_points(builtin("s3_nambu").domain, 5, 1)) CHECK(quad(fdtest::embed(builtin("s3_nambu"), u), {1, 1, 1, 1}) == doctest::Approx(1.0));
  const auto pr = builtin("s2xs2", {{"r1", "1"}, {"r2", "3"}});
  for (const auto& u : sample_points(pr.domain, 5, 1)) {
    const auto x = fdtest::embed(pr, u);
    CHECK(quad(x, {1, 1, 1}) == doctest::Approx(1.0));
    CHECK(quad(x, {1, 1, 1}, 3) == doctest::Approx(9.0));
  }
  const auto ct = builtin("clifford_torus", {{"r1", "2"}, {"r2", "0.5"}});
  for (const auto& u : sample_points(ct.domain, 5, 1)) {
    const auto x = fdtest::embed(ct, u);
    CHECK(quad(x, {1, 1}) == doctest::Approx(4.0));
    CHECK(quad(x, {1, 1}, 2) == doctest::Approx(0.25));
  }
  const auto t = builtin("torus");
  for (const auto& u : sample_points(t.domain, 5, 1)) {
    const auto x = fdtest::embed(t, u);
    const double rho = std::sqrt(x[0] * x[0] + x[1] * x[1]) - 2;
    CHECK(rho * rho + x[2] * x[2] == doctest::Approx(0.25));
  }
}

TEST_CASE("declared normals are unit normals") {
  for (const auto& info : builtin_registry()) {
    INFO(info.name);
    const auto mf = builtin(info.name);
    REQUIRE(mf.normals.has_value());
    CHECK(static_cast<int>(mf.normals->size()) == mf.m - mf.n);
    for (const auto& u : sample_points(mf.domain, 3, 5)) {
      const ConnectionContext ctx(mf, u);
      for (const auto& nv : *mf.normals) {
        Vector v;
        for (const auto& e : nv) v.push_back(eval_field_expr(e, ctx.frame().chart(), ctx.frame().x()).value());
        for (double t : ctx.frame().project_tangent(v)) CHECK(std::abs(t) < 1e-12);
        CHECK(std::abs(ctx.frame().inner(v, v)) == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("expected invariants evaluate") {
  const auto ex = builtin_expectations("s2xs2", {{"r1", "1"}, {"r2", "2"}});
  REQUIRE(ex.scalar_curvature.has_value());
  CHECK(*ex.scalar_curvature == doctest::Approx(2.5));
  CHECK(builtin_expectations("indefinite_s2xs2", {{"r1", "1"}, {"r2", "2"}}).scalar_curvature.value() == doctest::Approx(1.5));
  CHECK(builtin_expectations("hyperbolic").scalar_curvature.value() == doctest::Approx(-2.0));
  CHECK(builtin_expectations("para_plane").epsilon == -1);
}

TEST_CASE("parameter errors") {
  CHECK_THROWS_WITH_AS(builtin("nosuch"), doctest::Contains("unknown manifold"), ConfigError);
  CHECK_THROWS_AS(builtin("sphere", {{"radius", "2"}}), ConfigError);
  CHECK_THROWS_AS(builtin("sphere", {{"r", "-1"}}), ConfigError);
  CHECK_THROWS_AS(builtin("sphere", {{"r", "two"}}), ConfigError);
  CHECK_THROWS_AS(builtin("torus", {{"R", "1"}, {"r", "2"}}), ConfigError);
  CHECK_NOTHROW(builtin("sphere_nambu", {{"rho", "2 + cos(u1)"}}));
  CHECK_THROWS_AS(builtin("sphere_nambu", {{"rho", "2 + cos(u7)"}}), ParseError);
}

TEST_CASE("sampling is deterministic and respects the margin") {
  const auto mf = builtin("sphere");
  const auto a = sample_points(mf.domain, 50, 9), b = sample_points(mf.domain, 50, 9), c = sample_points(mf.domain, 50, 10);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& u : a) {
    CHECK(u[0] >= 0.1);
    CHECK(u[0] <= 3.14159265358979 - 0.1);
  }
  const std::vector<int> counts{10, 10};
  CHECK(grid_points(builtin("torus").domain, counts).size() == 100);
}
