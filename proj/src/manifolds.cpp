#include "bracketgeo/manifolds.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "bracketgeo/error.hpp"

namespace bracketgeo {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string("(") + buf + ")";
}

const BuiltinInfo& info_for(const std::string& name) {
  for (const auto& b : builtin_registry()) {
    if (b.name == name) return b;
  }
  throw ConfigError("unknown manifold '" + name + "'");
}

class Params {
 public:
  Params(const BuiltinInfo& info, const ParamMap& given) : info_(info) {
    for (const auto& [k, v] : given) {
      bool known = false;
      for (const auto& p : info.params) known = known || p.name == k;
      if (!known) throw ConfigError("manifold '" + info.name + "' has no parameter '" + k + "'");
    }
    given_ = given;
  }

  std::string text(const std::string& key) const {
    auto it = given_.find(key);
    if (it != given_.end()) return it->second;
    for (const auto& p : info_.params)
      if (p.name == key) return p.default_value;
    throw ConfigError("internal: missing parameter " + key);
  }

  double number(const std::string& key) const {
    const std::string t = text(key);
    try {
      std::size_t used = 0;
      double v = std::stod(t, &used);
      if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("parameter '" + key + "' of '" + info_.name + "' must be a number, got '" + t + "'");
    }
  }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0)) throw ConfigError("parameter '" + key + "' of '" + info_.name + "' must be > 0");
    return v;
  }

 private:
  const BuiltinInfo& info_;
  ParamMap given_;
};

std::vector<Expr> parse_all(const std::vector<std::string>& texts, std::span<const std::string> names) {
  std::vector<Expr> out;
  for (const auto& t : texts) out.push_back(parse(t, names));
  return out;
}

std::vector<std::vector<Expr>> poisson_matrix(int n, const std::vector<std::tuple<int, int, std::string>>& upper, std::span<const std::string> names) {
  std::vector<std::vector<Expr>> theta(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n), Expr::constant(0.0, n)));
  for (const auto& [a, b, text] : upper) {
    theta[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = parse(text, names);
    theta[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = parse("-(" + text + ")", names);
  }
  return theta;
}

std::vector<std::vector<Expr>> normal_fields(const EmbeddedManifold& mfld, const std::vector<std::vector<std::string>>& texts) {
  std::vector<std::vector<Expr>> out;
  for (const auto& nv : texts) {
    std::vector<Expr> comps;
    for (const auto& t : nv) comps.push_back(parse_field_expr(mfld, t));
    out.push_back(std::move(comps));
  }
  return out;
}

EmbeddedManifold make(const std::string& name, int n, int m) {
  EmbeddedManifold mf;
  mf.name = name;
  mf.n = n;
  mf.m = m;
  return mf;
}

std::string sphere_gamma_text(double r, const std::string& rho) { return num(r) + "^2*sin(u1)/(" + rho + ")"; }

}  // namespace

const std::vector<BuiltinInfo>& builtin_registry() {
  static const std::vector<BuiltinInfo> registry = {
      {"sphere", "round 2-sphere in R^3 with the area-form Poisson structure", {{"r", "1", "radius"}}},
      {"sphere_nambu", "round 2-sphere in R^3 with a Nambu 2-bracket of arbitrary density", {{"r", "1", "radius"}, {"rho", "1", "density expression in u1,u2"}}},
      {"torus", "torus of revolution in R^3 with the area-form Poisson structure", {{"R", "2", "major radius"}, {"r", "0.5", "minor radius"}}},
      {"clifford_torus", "flat torus in R^4", {{"r1", "1", "first radius"}, {"r2", "1", "second radius"}}},
      {"hyperbolic", "hyperbolic plane as the hyperboloid in Minkowski R^{2,1}, Nambu bracket", {{"a_max", "2", "upper bound of the radial chart coordinate"}}},
      {"s2xs2", "product of two round spheres in R^6 with the product Poisson structure", {{"r1", "1", "first radius"}, {"r2", "1", "second radius"}}},
      {"indefinite_s2xs2", "S^2 x S^2 in R^{3,3}, neutral-signature Kaehler", {{"r1", "1", "first radius"}, {"r2", "1", "second radius"}}},
      {"para_plane", "flat para-Kaehler plane R^{1,1}", {{"L", "1", "half-width of the chart square"}}},
      {"s3_nambu", "round 3-sphere in R^4 with the volume-form Nambu 3-bracket", {{"r", "1", "radius"}}},
  };
  return registry;
}

EmbeddedManifold builtin(const std::string& name, const ParamMap& given) {
  const BuiltinInfo& info = info_for(name);
  const Params p(info, given);

  if (name == "sphere" || name == "sphere_nambu") {
    const double r = p.positive("r");
    auto mf = make(name, 2, 3);
    const auto u = mf.chart_names();
    const std::string R = num(r);
    mf.embedding = parse_all({R + "*sin(u1)*cos(u2)", R + "*sin(u1)*sin(u2)", R + "*cos(u1)"}, u);
    mf.ambient = AmbientMetric::diagonal({1, 1, 1});
    if (name == "sphere") {
      mf.bracket = BracketStructure::poisson(poisson_matrix(2, {{0, 1, "1/(" + R + "^2*sin(u1))"}}, u));
    } else {
      mf.bracket = BracketStructure::nambu(parse(p.text("rho"), u), 2);
    }
    mf.domain.box = {{0.0, kPi}, {0.0, 2 * kPi}};
    mf.normals = normal_fields(mf, {{"x1/" + R, "x2/" + R, "x3/" + R}});
    return mf;
  }
  if (name == "torus") {
    const double big = p.positive("R"), r = p.positive("r");
    if (!(big > r)) throw ConfigError("torus needs R > r");
    auto mf = make(name, 2, 3);
    const auto u = mf.chart_names();
    const std::string Rs = num(big), rs = num(r);
    const std::string ring = "(" + Rs + " + " + rs + "*cos(u1))";
    mf.embedding = parse_all({ring + "*cos(u2)", ring + "*sin(u2)", rs + "*sin(u1)"}, u);
    mf.ambient = AmbientMetric::diagonal({1, 1, 1});
    mf.bracket = BracketStructure::poisson(poisson_matrix(2, {{0, 1, "1/(" + rs + "*" + ring + ")"}}, u));
    mf.domain.box = {{0.0, 2 * kPi}, {0.0, 2 * kPi}};
    mf.normals = normal_fields(mf, {{"cos(u1)*cos(u2)", "cos(u1)*sin(u2)", "sin(u1)"}});
    return mf;
  }
  if (name == "clifford_torus") {
    const double r1 = p.positive("r1"), r2 = p.positive("r2");
    auto mf = make(name, 2, 4);
    const auto u = mf.chart_names();
    const std::string a = num(r1), b = num(r2);
    mf.embedding = parse_all({a + "*cos(u1)", a + "*sin(u1)", b + "*cos(u2)", b + "*sin(u2)"}, u);
    mf.ambient = AmbientMetric::diagonal({1, 1, 1, 1});
    mf.bracket = BracketStructure::poisson(poisson_matrix(2, {{0, 1, "1/(" + a + "*" + b + ")"}}, u));
    mf.domain.box = {{0.0, 2 * kPi}, {0.0, 2 * kPi}};
    mf.normals = normal_fields(mf, {{"cos(u1)", "sin(u1)", "0", "0"}, {"0", "0", "cos(u2)", "sin(u2)"}});
    return mf;
  }
  if (name == "hyperbolic") {
    const double a_max = p.positive("a_max");
    auto mf = make(name, 2, 3);
    const auto u = mf.chart_names();
    mf.embedding = parse_all({"sinh(u1)*cos(u2)", "sinh(u1)*sin(u2)", "cosh(u1)"}, u);
    mf.ambient = AmbientMetric::diagonal({1, 1, -1});
    mf.bracket = BracketStructure::nambu(parse("sinh(u1)", u), 2);
    mf.domain.box = {{0.0, a_max}, {0.0, 2 * kPi}};
    mf.normals = normal_fields(mf, {{"x1", "x2", "x3"}});
    return mf;
  }
  if (name == "s2xs2" || name == "indefinite_s2xs2") {
    const double r1 = p.positive("r1"), r2 = p.positive("r2");
    auto mf = make(name, 4, 6);
    const auto u = mf.chart_names();
    const std::string a = num(r1), b = num(r2);
    mf.embedding = parse_all({a + "*sin(u1)*cos(u2)", a + "*sin(u1)*sin(u2)", a + "*cos(u1)", b + "*sin(u3)*cos(u4)", b + "*sin(u3)*sin(u4)",
                              b + "*cos(u3)"},
                             u);
    if (name == "s2xs2") {
      mf.ambient = AmbientMetric::diagonal({1, 1, 1, 1, 1, 1});
    } else {
      mf.ambient = AmbientMetric::diagonal({1, 1, 1, -1, -1, -1});
    }
    mf.bracket = BracketStructure::poisson(poisson_matrix(4, {{0, 1, "1/(" + a + "^2*sin(u1))"}, {2, 3, "1/(" + b + "^2*sin(u3))"}}, u));
    mf.domain.box = {{0.0, kPi}, {0.0, 2 * kPi}, {0.0, kPi}, {0.0, 2 * kPi}};
    mf.normals = normal_fields(mf, {{"x1/" + a, "x2/" + a, "x3/" + a, "0", "0", "0"}, {"0", "0", "0", "x4/" + b, "x5/" + b, "x6/" + b}});
    return mf;
  }
  if (name == "para_plane") {
    const double half = p.positive("L");
    auto mf = make(name, 2, 2);
    const auto u = mf.chart_names();
    mf.embedding = parse_all({"u1", "u2"}, u);
    mf.ambient = AmbientMetric::diagonal({1, -1});
    mf.bracket = BracketStructure::poisson(poisson_matrix(2, {{0, 1, "-1"}}, u));
    mf.domain.box = {{-half, half}, {-half, half}};
    mf.domain.margin = std::min(0.1, 0.25 * half);
    mf.normals = std::vector<std::vector<Expr>>{};
    return mf;
  }
  if (name == "s3_nambu") {
    const double r = p.positive("r");
    auto mf = make(name, 3, 4);
    const auto u = mf.chart_names();
    const std::string R = num(r);
    mf.embedding = parse_all({R + "*sin(u1)*sin(u2)*cos(u3)", R + "*sin(u1)*sin(u2)*sin(u3)", R + "*sin(u1)*cos(u2)", R + "*cos(u1)"}, u);
    mf.ambient = AmbientMetric::diagonal({1, 1, 1, 1});
    mf.bracket = BracketStructure::nambu(parse(R + "^3*sin(u1)^2*sin(u2)", u), 3);
    mf.domain.box = {{0.0, kPi}, {0.0, kPi}, {0.0, 2 * kPi}};
    mf.normals = normal_fields(mf, {{"x1/" + R, "x2/" + R, "x3/" + R, "x4/" + R}});
    return mf;
  }
  throw ConfigError("unknown manifold '" + name + "'");
}

ExpectedInvariants builtin_expectations(const std::string& name, const ParamMap& given) {
  const BuiltinInfo& info = info_for(name);
  const Params p(info, given);
  ExpectedInvariants e;
  e.gamma = "1";
  if (name == "sphere") {
    const double r = p.positive("r");
    e.scalar_curvature = 2 / (r * r);
    e.laplacians = {"hat", "kahler"};
  } else if (name == "sphere_nambu") {
    const double r = p.positive("r");
    e.gamma = sphere_gamma_text(r, p.text("rho"));
    e.scalar_curvature = 2 / (r * r);
    e.laplacians = {"hat", "nambu", "kahler"};
  } else if (name == "torus") {
    e.laplacians = {"hat", "kahler"};
    e.notes = "scalar curvature checked against the coordinate pipeline";
  } else if (name == "clifford_torus") {
    e.scalar_curvature = 0;
    e.laplacians = {"hat", "kahler"};
  } else if (name == "hyperbolic") {
    e.scalar_curvature = -2;
    e.laplacians = {"hat", "nambu", "kahler"};
  } else if (name == "s2xs2") {
    const double r1 = p.positive("r1"), r2 = p.positive("r2");
    e.scalar_curvature = 2 / (r1 * r1) + 2 / (r2 * r2);
    e.laplacians = {"hat", "kahler"};
  } else if (name == "indefinite_s2xs2") {
    const double r1 = p.positive("r1"), r2 = p.positive("r2");
    e.scalar_curvature = 2 / (r1 * r1) - 2 / (r2 * r2);
    e.laplacians = {"hat", "kahler"};
  } else if (name == "para_plane") {
    e.epsilon = -1;
    e.scalar_curvature = 0;
    e.laplacians = {"hat", "kahler"};
  } else if (name == "s3_nambu") {
    const double r = p.positive("r");
    e.scalar_curvature = 6 / (r * r);
    e.laplacians = {"hat", "nambu"};
  }
  return e;
}

EmbeddedManifold distorted_s2xs2() {
  auto mf = builtin("s2xs2");
  mf.name = "distorted_s2xs2";
  const auto u = mf.chart_names();
  auto theta = mf.bracket.poisson_declared();
  for (int a = 2; a < 4; ++a)
    for (int b = 2; b < 4; ++b)
      if (!theta[a][b].is_zero_literal()) theta[a][b] = parse("(2 + cos(u3))*(" + theta[a][b].print(u) + ")", u);
  mf.bracket = BracketStructure::poisson(theta);
  return mf;
}

}  // namespace bracketgeo
