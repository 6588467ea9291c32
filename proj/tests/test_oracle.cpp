#include <doctest.h>

#include <cmath>

#include "bracketgeo/config.hpp"
#include "bracketgeo/error.hpp"
#include "bracketgeo/manifolds.hpp"
#include "bracketgeo/oracle.hpp"
#include "support/surface.hpp"

using namespace bracketgeo;

namespace {

Jet field(const Oracle& o, const EmbeddedManifold& mf, const char* text) { return eval_field_expr(parse_field_expr(mf, text), o.chart(), o.x()); }

// Sphere of radius 1 inside R^3 with the conformally flat metric exp(2 x1) delta.
EmbeddedManifold conformal_sphere() {
  return manifold_from_json(nlohmann::json::parse(R"J({"manifold": {"custom": {
    "n": 2, "m": 3, "embedding": ["sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "cos(u1)"],
    "ambient": {"general": [["exp(2*x1)", "0", "0"], ["0", "exp(2*x1)", "0"], ["0", "0", "exp(2*x1)"]]},
    "bracket": {"nambu": {"rho": "sin(u1)"}},
    "domain": {"box": [[0, 3.14159], [0, 6.28318]]}}}})J"));
}

// Laplace-Beltrami from nested finite differences of the embedding alone.
double fd_laplace(const EmbeddedManifold& mf, const Expr& f, std::span<const double> u) {
  const int n = mf.n;
  auto flux = [&](int a) {
    return [&, a](std::span<const double> p) {
      const Eigen::MatrixXd g = fdtest::induced_metric(mf, p);
      const Eigen::MatrixXd gi = g.inverse();
      double s = 0;
      for (int b = 0; b < n; ++b) {
        std::vector<int> deg(static_cast<std::size_t>(n), 0);
        deg[static_cast<std::size_t>(b)] = 1;
        s += gi(a, b) * fdtest::partial([&](std::span<const double> q) { return f.eval(q); }, p, deg, 1e-3);
      }
      return std::sqrt(std::abs(g.determinant())) * s;
    };
  };
  double div = 0;
  for (int a = 0; a < n; ++a) {
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    deg[static_cast<std::size_t>(a)] = 1;
    div += fdtest::partial(flux(a), u, deg, 1e-2, 4);
  }
  return div / std::sqrt(std::abs(fdtest::induced_metric(mf, u).determinant()));
}

}  // namespace

TEST_CASE("round sphere metric, connection and curvature") {
  for (double r : {0.5, 1.0, 2.0}) {
    const auto mf = builtin("sphere", {{"r", std::to_string(r)}});
    const std::vector<double> u{1.1, 0.3};
    const Oracle o(mf, u);
    const double s = std::sin(u[0]), c = std::cos(u[0]);
    CHECK(o.metric().value(0, 0) == doctest::Approx(r * r).epsilon(1e-13));
    CHECK(o.metric().value(1, 1) == doctest::Approx(r * r * s * s).epsilon(1e-13));
    CHECK(std::abs(o.metric().value(0, 1)) < 1e-14);
    CHECK(o.christoffel(0, 1, 1) == doctest::Approx(-s * c).epsilon(1e-12));
    CHECK(o.christoffel(1, 0, 1) == doctest::Approx(c / s).epsilon(1e-12));
    CHECK(o.christoffel(1, 1, 0) == doctest::Approx(c / s).epsilon(1e-12));
    CHECK(std::abs(o.christoffel(0, 0, 0)) < 1e-13);
    CHECK(o.riemann(0, 1, 0, 1) == doctest::Approx(r * r * s * s).epsilon(1e-12));
    CHECK(o.riemann(0, 1, 1, 0) == doctest::Approx(-r * r * s * s).epsilon(1e-12));
    CHECK(std::abs(o.riemann(0, 0, 0, 1)) < 1e-13);
    CHECK(o.ricci(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o.ricci(1, 1) == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(o.scalar_curvature() == doctest::Approx(2 / (r * r)).epsilon(1e-12));
  }
}

TEST_CASE("curvature of the torus, hyperbolic plane and flat cases") {
  const auto torus = builtin("torus", {{"R", "3"}, {"r", "1"}});
  for (double a : {0.0, 1.0, 2.5, 4.0}) {
    const Oracle o(torus, std::vector<double>{a, 0.7});
    CHECK(o.scalar_curvature() == doctest::Approx(2 * std::cos(a) / (3 + std::cos(a))).epsilon(1e-11));
  }
  const auto hyp = builtin("hyperbolic");
  for (double a : {0.3, 1.0, 1.8}) {
    const Oracle o(hyp, std::vector<double>{a, 2.0});
    CHECK(o.metric().value(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(o.metric().value(1, 1) == doctest::Approx(std::sinh(a) * std::sinh(a)).epsilon(1e-12));
    CHECK(o.scalar_curvature() == doctest::Approx(-2.0).epsilon(1e-10));
  }
  CHECK(std::abs(Oracle(builtin("clifford_torus"), std::vector<double>{0.4, 1.0}).scalar_curvature()) < 1e-13);
  CHECK(std::abs(Oracle(builtin("para_plane"), std::vector<double>{0.4, 0.1}).scalar_curvature()) < 1e-15);
  CHECK(Oracle(builtin("s3_nambu", {{"r", "2"}}), std::vector<double>{1.0, 2.0, 0.5}).scalar_curvature() == doctest::Approx(1.5).epsilon(1e-11));
  CHECK(Oracle(builtin("s2xs2", {{"r1", "1"}, {"r2", "2"}}), std::vector<double>{1.0, 2.0, 0.5, 1.0}).scalar_curvature() ==
        doctest::Approx(2.5).epsilon(1e-11));
  CHECK(Oracle(builtin("indefinite_s2xs2", {{"r1", "1"}, {"r2", "2"}}), std::vector<double>{1.0, 2.0, 0.5, 1.0}).scalar_curvature() ==
        doctest::Approx(1.5).epsilon(1e-11));
}

TEST_CASE("Laplace-Beltrami against spherical harmonics") {
  const auto mf = builtin("sphere", {{"r", "2"}});
  const std::vector<double> u{0.8, 2.4};
  const Oracle o(mf, u);
  const double c = std::cos(u[0]);
  CHECK(o.laplace(field(o, mf, "x3")) == doctest::Approx(-2 * 2 * c / 4).epsilon(1e-12));
  CHECK(o.laplace(field(o, mf, "x3^2")) == doctest::Approx(2 - 6 * c * c).epsilon(1e-12));
  CHECK(o.laplace(field(o, mf, "x1*x2")) == doctest::Approx(-6 * (4 * std::sin(u[0]) * std::sin(u[0]) * std::cos(u[1]) * std::sin(u[1])) / 4).epsilon(1e-12));
  CHECK_THROWS_AS(o.laplace(Jet::constant(1.0, 2, 1)), ShapeError);
}

TEST_CASE("Laplace-Beltrami against nested finite differences") {
  for (const char* name : {"torus", "hyperbolic", "clifford_torus"}) {
    INFO(name);
    const auto mf = builtin(name);
    const Expr f = parse("u1^2*sin(u2) + cos(u1)", mf.chart_names());
    for (const auto& u : sample_points(mf.domain, 3, 11)) {
      const Oracle o(mf, u);
      const Jet fj = f.eval_jet(o.chart());
      CHECK(o.laplace(fj) == doctest::Approx(fd_laplace(mf, f, u)).epsilon(1e-6));
    }
  }
}

TEST_CASE("gradient is the tangential part of the ambient gradient") {
  const auto mf = builtin("torus");
  const std::vector<double> u{2.0, 1.0};
  const Oracle o(mf, u);
  const auto x = fdtest::embed(mf, u);
  const Eigen::MatrixXd p = fdtest::tangent_projection(mf, u);
  const Eigen::Vector3d expected = p * Eigen::Vector3d(x[1], x[0], 0.0);
  const auto g = o.gradient(field(o, mf, "x1*x2"));
  for (int i = 0; i < 3; ++i) CHECK(g[static_cast<std::size_t>(i)] == doctest::Approx(expected(i)).epsilon(1e-8));
}

TEST_CASE("second fundamental form of the round sphere") {
  const auto mf = builtin("sphere");
  const std::vector<double> u{1.3, 4.0};
  const Oracle o(mf, u);
  const auto x = fdtest::embed(mf, u);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const auto al = o.second_fundamental(a, b);
      for (int i = 0; i < 3; ++i) CHECK(al[static_cast<std::size_t>(i)] == doctest::Approx(-o.metric().value(a, b) * x[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("conformally flat ambient connection and curvature") {
  const auto mf = conformal_sphere();
  const std::vector<double> u{1.0, 0.6};
  const Oracle o(mf, u);
  const double e2 = std::exp(2 * fdtest::embed(mf, u)[0]);
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double expected = delta(i, j) * delta(k, 0) + delta(i, k) * delta(j, 0) - delta(j, k) * delta(i, 0);
        CHECK(o.ambient_christoffel(i, j, k) == doctest::Approx(expected).epsilon(1e-12));
      }
  // dy^2 + y^2 (flat plane) with y = exp(x1): radial planes are flat, the
  // transverse plane has sectional curvature -1/y^2.
  CHECK(o.ambient_riemann(1, 2, 1, 2) == doctest::Approx(-e2).epsilon(1e-12));
  CHECK(o.ambient_riemann(1, 2, 2, 1) == doctest::Approx(e2).epsilon(1e-12));
  CHECK(std::abs(o.ambient_riemann(0, 1, 0, 1)) < 1e-12);
  CHECK(std::abs(o.ambient_riemann(0, 2, 0, 2)) < 1e-12);
}

TEST_CASE("intrinsic curvature in a conformally rescaled ambient") {
  // The induced metric is exp(2 x1) times the round one, so its scalar
  // curvature follows the 2-D conformal law S = exp(-2 phi)(2 - 2 Delta_0 phi).
  const auto mf = conformal_sphere();
  const auto round = builtin("sphere");
  const std::vector<double> u{1.2, 0.9};
  const Oracle o(mf, u), o0(round, u);
  const double phi = fdtest::embed(mf, u)[0];
  const double lap0 = o0.laplace(field(o0, round, "x1"));
  CHECK(o.scalar_curvature() == doctest::Approx(std::exp(-2 * phi) * (2 - 2 * lap0)).epsilon(1e-11));
}

TEST_CASE("oracle refuses truncations below order three") {
  CHECK_THROWS_AS(Oracle(builtin("sphere"), std::vector<double>{1.0, 1.0}, 2), ShapeError);
}
