#include <doctest.h>

#include <cmath>

#include "bracketgeo/bracket.hpp"
#include "bracketgeo/config.hpp"
#include "bracketgeo/error.hpp"
#include "bracketgeo/manifolds.hpp"
#include "support/surface.hpp"

using namespace bracketgeo;

namespace {

const char* kBuiltins[] = {"sphere", "sphere_nambu", "torus", "clifford_torus", "hyperbolic", "s2xs2", "indefinite_s2xs2", "para_plane", "s3_nambu"};

double bracket_of(const PointFrame& f, std::initializer_list<int> components) {
  std::vector<Jet> args;
  for (int i : components) args.push_back(f.x()[static_cast<std::size_t>(i)]);
  return bracket_apply(f, args).value();
}

}  // namespace

TEST_CASE("tuple enumeration sizes") {
  CHECK(multi_indices(4, 2, false).size() == 16);
  CHECK(multi_indices(4, 2, true).size() == 6);
  CHECK(multi_indices(4, 3, true).size() == 4);
  CHECK(multi_indices(3, 1, false).size() == 3);
  CHECK(multi_indices(2, 3, true).empty());
  for (const auto& t : multi_indices(5, 3, true)) CHECK((t[0] < t[1] && t[1] < t[2]));
}

TEST_CASE("sphere coordinate brackets are the cross-product algebra") {
  for (double r : {0.5, 1.0, 2.0}) {
    const auto mf = builtin("sphere", {{"r", std::to_string(r)}});
    const std::vector<double> u{0.9, 2.1};
    const PointFrame f(mf, u);
    const auto x = fdtest::embed(mf, u);
    CHECK(bracket_of(f, {0, 1}) == doctest::Approx(x[2] / r).epsilon(1e-12));
    CHECK(bracket_of(f, {1, 2}) == doctest::Approx(x[0] / r).epsilon(1e-12));
    CHECK(bracket_of(f, {2, 0}) == doctest::Approx(x[1] / r).epsilon(1e-12));
    CHECK(bracket_of(f, {1, 0}) == doctest::Approx(-x[2] / r).epsilon(1e-12));
  }
}

TEST_CASE("three-sphere 3-brackets follow the Levi-Civita symbol") {
  const auto mf = builtin("s3_nambu", {{"r", "1.5"}});
  const std::vector<double> u{1.1, 0.7, 2.5};
  const auto x = fdtest::embed(mf, u);
  for (bool fast : {false, true}) {
    const PointFrame f(mf, u, {3, fast});
    const double s = bracket_of(f, {0, 1, 2}) / (x[3] / 1.5);
    CHECK(std::abs(s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bracket_of(f, {0, 1, 3}) == doctest::Approx(-s * x[2] / 1.5).epsilon(1e-12));
    CHECK(bracket_of(f, {0, 2, 3}) == doctest::Approx(s * x[1] / 1.5).epsilon(1e-12));
    CHECK(bracket_of(f, {1, 2, 3}) == doctest::Approx(-s * x[0] / 1.5).epsilon(1e-12));
    CHECK(std::abs(bracket_of(f, {0, 0, 3})) < 1e-14);
  }
}

TEST_CASE("trace scale equals det g over the squared density") {
  struct Case {
    const char* name;
    std::vector<double> u;
  };
  const Case cases[] = {{"sphere", {0.8, 1.3}},       {"sphere_nambu", {2.0, 4.0}},  {"torus", {1.0, 2.0}},       {"clifford_torus", {0.3, 5.0}},
                        {"hyperbolic", {1.2, 0.4}},   {"para_plane", {0.2, -0.3}},   {"s3_nambu", {0.9, 2.0, 1.0}}, {"s2xs2", {0.7, 1.0, 2.2, 3.0}},
                        {"indefinite_s2xs2", {0.7, 1.0, 2.2, 3.0}}};
  for (const auto& c : cases) {
    INFO(c.name);
    const auto mf = builtin(c.name);
    const PointFrame f(mf, c.u);
    const double detg = fdtest::induced_metric(mf, c.u).determinant();
    double expected = 0;
    if (mf.bracket.kind() == BracketStructure::Kind::NambuDensity) {
      const double rho = mf.bracket.rho().eval(c.u);
      expected = detg / (rho * rho);
    } else if (mf.n == 2) {
      const double t = mf.bracket.poisson_declared()[0][1].eval(c.u);
      expected = detg * t * t;
    } else {
      // Product structure: trace of PP is the sum of the two block traces.
      const Eigen::MatrixXd g = fdtest::induced_metric(mf, c.u);
      const auto& th = mf.bracket.poisson_declared();
      const double t1 = th[0][1].eval(c.u), t2 = th[2][3].eval(c.u);
      const double b1 = g.block(0, 0, 2, 2).determinant() * t1 * t1, b2 = g.block(2, 2, 2, 2).determinant() * t2 * t2;
      expected = (2 * b1 + 2 * b2) / 4;
    }
    CHECK(f.trace_scale().value() == doctest::Approx(expected).epsilon(1e-8));
    CHECK(f.gamma2() == doctest::Approx(std::abs(expected)).epsilon(1e-8));
    CHECK(f.epsilon() == (expected > 0 ? 1 : -1));
  }
}

TEST_CASE("D is the eta-orthogonal tangent projection") {
  for (const char* name : kBuiltins) {
    INFO(name);
    const auto mf = builtin(name);
    const auto points = sample_points(mf.domain, 3, 7);
    for (const auto& u : points) {
      for (bool fast : {false, true}) {
        if (fast && !mf.bracket.antisymmetric()) continue;
        const PointFrame f(mf, u, {3, fast});
        const Eigen::MatrixXd p = fdtest::tangent_projection(mf, u);
        const auto eta = f.eta_values();
        double worst = 0;
        for (int i = 0; i < mf.m; ++i)
          for (int j = 0; j < mf.m; ++j) {
            double dij = 0;
            for (int k = 0; k < mf.m; ++k) dij += f.d(i, k).value() * eta[static_cast<std::size_t>(k * mf.m + j)];
            worst = std::max(worst, std::abs(dij - p(i, j)));
          }
        CHECK(worst < 1e-8);
        const auto res = projection_residuals(f);
        CHECK(res.idempotency < 1e-12);
        CHECK(res.eta_symmetry < 1e-12);
        CHECK(res.tangent_fix < 1e-12);
        CHECK(res.normal_kill < 1e-12);
        CHECK(res.complement < 1e-12);
        CHECK(res.trace < 1e-12);
      }
    }
  }
}

TEST_CASE("sorted-tuple contraction matches the full enumeration") {
  for (const char* name : {"sphere", "s2xs2", "s3_nambu", "hyperbolic"}) {
    INFO(name);
    const auto mf = builtin(name);
    for (const auto& u : sample_points(mf.domain, 4, 3)) {
      const PointFrame slow(mf, u, {3, false}), fast(mf, u, {3, true});
      CHECK(slow.tuples().size() >= fast.tuples().size());
      if (mf.bracket.order_n() > 1) CHECK(slow.tuples().size() > fast.tuples().size());
      const auto a = slow.d_values(), b = fast.d_values();
      for (std::size_t q = 0; q < a.size(); ++q) CHECK(std::abs(a[q] - b[q]) < 1e-12);
      CHECK(std::abs(slow.trace_scale().value() - fast.trace_scale().value()) < 1e-12);
      for (int i = 0; i < mf.m; ++i)
        for (int j = 0; j < mf.m; ++j) CHECK(std::abs(slow.pp(i, j).value() - fast.pp(i, j).value()) < 1e-12);
    }
  }
}

TEST_CASE("fast path is refused for structures without antisymmetry") {
  const auto mf = manifold_from_json(nlohmann::json::parse(R"J({"manifold": {"custom": {
    "n": 2, "m": 3, "embedding": ["sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "cos(u1)"],
    "ambient": {"diagonal": [1, 1, 1]},
    "bracket": {"multivector": {"arity": 2, "entries": [{"index": [1, 2], "value": "1"}, {"index": [2, 1], "value": "0.5"}], "antisymmetric": false}},
    "domain": {"box": [[0, 3.14159], [0, 6.28318]]}}}})J"));
  CHECK_THROWS_AS(PointFrame(mf, std::vector<double>{1.0, 1.0}, {3, true}), ApplicabilityError);
  CHECK_NOTHROW(PointFrame(mf, std::vector<double>{1.0, 1.0}, {3, false}));
}

TEST_CASE("vanishing bracket is degenerate") {
  const auto mf = manifold_from_json(nlohmann::json::parse(R"J({"manifold": {"custom": {
    "n": 2, "m": 3, "embedding": ["sin(u1)*cos(u2)", "sin(u1)*sin(u2)", "cos(u1)"],
    "ambient": {"diagonal": [1, 1, 1]},
    "bracket": {"poisson": {"theta": [["0", "u1 - 1"], ["1 - u1", "0"]]}},
    "domain": {"box": [[0, 3.14159], [0, 6.28318]]}}}})J"));
  CHECK_THROWS_AS(PointFrame(mf, std::vector<double>{1.0, 0.5}), DegenerateError);
  CHECK_NOTHROW(PointFrame(mf, std::vector<double>{1.5, 0.5}));
}

TEST_CASE("D of coordinates and functions") {
  const auto mf = builtin("torus");
  const std::vector<double> u{0.4, 1.9};
  const PointFrame f(mf, u);
  const Eigen::MatrixXd p = fdtest::tangent_projection(mf, u);
  // D^i(x^k) is the projection itself; D^i of a function is its tangential gradient.
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) CHECK(f.d_of(i, f.x()[static_cast<std::size_t>(k)]).value() == doctest::Approx(p(i, k)).epsilon(1e-8));
  const Jet h = f.x()[0] * f.x()[2];
  const auto x = fdtest::embed(mf, u);
  const Eigen::Vector3d grad_ambient(x[2], 0.0, x[0]);
  const Eigen::Vector3d expected = p * grad_ambient;
  for (int i = 0; i < 3; ++i) CHECK(f.d_of(i, h).value() == doctest::Approx(expected(i)).epsilon(1e-8));
}
