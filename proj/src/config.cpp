#include "bracketgeo/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bracketgeo/error.hpp"
#include "bracketgeo/manifolds.hpp"
#include "bracketgeo/validation.hpp"

namespace bracketgeo {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) throw ConfigError("'" + path + "' must be an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key '" + join(path, key) + "'");
  return *it;
}

const json& require_array(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require(obj, path, key);
  if (!v.is_array()) throw ConfigError("'" + join(path, key) + "' must be an array");
  return v;
}

int require_int(const json& obj, const std::string& path, const std::string& key) {
  const json& v = require(obj, path, key);
  if (!v.is_number_integer()) throw ConfigError("'" + join(path, key) + "' must be an integer");
  return v.get<int>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("'" + path + "' must be a number");
  return v.get<double>();
}

Expr expr_at(const json& v, const std::string& path, std::span<const std::string> names) {
  std::string text;
  if (v.is_string()) {
    text = v.get<std::string>();
  } else if (v.is_number()) {
    text = number_text(v.get<double>());
  } else {
    throw ConfigError("'" + path + "' must be an expression string");
  }
  try {
    return parse(text, names);
  } catch (const ParseError& e) {
    throw ConfigError("'" + path + "': " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

std::vector<std::vector<Expr>> matrix_at(const json& v, const std::string& path, std::size_t size, std::span<const std::string> names) {
  if (!v.is_array() || v.size() != size) throw ConfigError("'" + path + "' must be a " + std::to_string(size) + "x" + std::to_string(size) + " array");
  std::vector<std::vector<Expr>> out;
  for (std::size_t i = 0; i < size; ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() != size) throw ConfigError("'" + item(path, i) + "' must have " + std::to_string(size) + " entries");
    std::vector<Expr> r;
    for (std::size_t j = 0; j < size; ++j) r.push_back(expr_at(row[j], item(item(path, i), j), names));
    out.push_back(std::move(r));
  }
  return out;
}

EmbeddedManifold builtin_from_json(const json& node, const std::string& path) {
  const json& name = require(node, path, "builtin");
  if (!name.is_string()) throw ConfigError("'" + join(path, "builtin") + "' must be a string");
  ParamMap params;
  if (const auto it = node.find("params"); it != node.end()) {
    if (!it->is_object()) throw ConfigError("'" + join(path, "params") + "' must be an object");
    for (const auto& [k, v] : it->items()) {
      if (v.is_string()) {
        params[k] = v.get<std::string>();
      } else if (v.is_number()) {
        params[k] = number_text(v.get<double>());
      } else {
        throw ConfigError("'" + join(join(path, "params"), k) + "' must be a number or string");
      }
    }
  }
  return builtin(name.get<std::string>(), params);
}

AmbientMetric ambient_from_json(const json& node, const std::string& path, int m) {
  if (!node.is_object()) throw ConfigError("'" + path + "' must be an object");
  if (const auto it = node.find("diagonal"); it != node.end()) {
    const std::string p = join(path, "diagonal");
    if (!it->is_array() || static_cast<int>(it->size()) != m) throw ConfigError("'" + p + "' must list m = " + std::to_string(m) + " signs");
    std::vector<int> signs;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const double s = as_number((*it)[i], item(p, i));
      if (s != 1.0 && s != -1.0) throw ConfigError("'" + item(p, i) + "' must be +1 or -1");
      signs.push_back(static_cast<int>(s));
    }
    return AmbientMetric::diagonal(std::move(signs));
  }
  if (const auto it = node.find("general"); it != node.end()) {
    const auto names = numbered_names("x", m);
    auto entries = matrix_at(*it, join(path, "general"), static_cast<std::size_t>(m), names);
    return AmbientMetric::general(std::move(entries));
  }
  throw ConfigError("missing key '" + join(path, "diagonal") + "' or '" + join(path, "general") + "'");
}

BracketStructure bracket_from_json(const json& node, const std::string& path, int n) {
  if (!node.is_object()) throw ConfigError("'" + path + "' must be an object");
  const auto names = numbered_names("u", n);
  if (const auto it = node.find("nambu"); it != node.end()) {
    const std::string p = join(path, "nambu");
    return BracketStructure::nambu(expr_at(require(*it, p, "rho"), join(p, "rho"), names), n);
  }
  if (const auto it = node.find("poisson"); it != node.end()) {
    const std::string p = join(path, "poisson");
    return BracketStructure::poisson(matrix_at(require(*it, p, "theta"), join(p, "theta"), static_cast<std::size_t>(n), names));
  }
  if (const auto it = node.find("multivector"); it != node.end()) {
    const std::string p = join(path, "multivector");
    const int arity = require_int(*it, p, "arity");
    bool antisymmetric = false;
    if (const auto a = it->find("antisymmetric"); a != it->end()) {
      if (!a->is_boolean()) throw ConfigError("'" + join(p, "antisymmetric") + "' must be a boolean");
      antisymmetric = a->get<bool>();
    }
    const json& list = require_array(*it, p, "entries");
    std::vector<BracketStructure::Entry> entries;
    for (std::size_t e = 0; e < list.size(); ++e) {
      const std::string ep = item(join(p, "entries"), e);
      const json& idx = require_array(list[e], ep, "index");
      BracketStructure::Entry entry;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (!idx[k].is_number_integer()) throw ConfigError("'" + item(join(ep, "index"), k) + "' must be an integer");
        const int a = idx[k].get<int>();
        if (a < 1 || a > n) throw ConfigError("'" + item(join(ep, "index"), k) + "' must lie in 1.." + std::to_string(n));
        entry.index.push_back(a - 1);
      }
      entry.value = expr_at(require(list[e], ep, "value"), join(ep, "value"), names);
      entries.push_back(std::move(entry));
    }
    return BracketStructure::multivector(n, arity, std::move(entries), antisymmetric);
  }
  throw ConfigError("missing key '" + join(path, "nambu") + "', '" + join(path, "poisson") + "' or '" + join(path, "multivector") + "'");
}

EmbeddedManifold custom_from_json(const json& node, const std::string& path) {
  EmbeddedManifold mf;
  mf.name = "custom";
  if (const auto it = node.find("name"); it != node.end() && it->is_string()) mf.name = it->get<std::string>();
  mf.n = require_int(node, path, "n");
  mf.m = require_int(node, path, "m");
  if (mf.n < 1 || mf.m < mf.n) throw ConfigError("'" + path + "' needs 1 <= n <= m");

  const auto u = mf.chart_names();
  const json& emb = require_array(node, path, "embedding");
  if (static_cast<int>(emb.size()) != mf.m) throw ConfigError("'" + join(path, "embedding") + "' must have m = " + std::to_string(mf.m) + " entries");
  for (std::size_t i = 0; i < emb.size(); ++i) mf.embedding.push_back(expr_at(emb[i], item(join(path, "embedding"), i), u));

  mf.ambient = ambient_from_json(require(node, path, "ambient"), join(path, "ambient"), mf.m);
  mf.bracket = bracket_from_json(require(node, path, "bracket"), join(path, "bracket"), mf.n);

  const json& dom = require(node, path, "domain");
  const std::string dp = join(path, "domain");
  const json& box = require_array(dom, dp, "box");
  for (std::size_t a = 0; a < box.size(); ++a) {
    const std::string bp = item(join(dp, "box"), a);
    if (!box[a].is_array() || box[a].size() != 2) throw ConfigError("'" + bp + "' must be [lo, hi]");
    mf.domain.box.emplace_back(as_number(box[a][0], item(bp, 0)), as_number(box[a][1], item(bp, 1)));
  }
  if (const auto it = dom.find("margin"); it != dom.end()) mf.domain.margin = as_number(*it, join(dp, "margin"));

  if (const auto it = node.find("normals"); it != node.end()) {
    const std::string np = join(path, "normals");
    if (!it->is_array()) throw ConfigError("'" + np + "' must be an array");
    std::vector<std::vector<Expr>> normals;
    for (std::size_t k = 0; k < it->size(); ++k) {
      const json& nv = (*it)[k];
      if (!nv.is_array() || static_cast<int>(nv.size()) != mf.m) throw ConfigError("'" + item(np, k) + "' must have m = " + std::to_string(mf.m) + " entries");
      std::vector<Expr> comps;
      for (std::size_t i = 0; i < nv.size(); ++i) {
        const std::string cp = item(item(np, k), i);
        if (!nv[i].is_string() && !nv[i].is_number()) throw ConfigError("'" + cp + "' must be an expression string");
        const std::string text = nv[i].is_string() ? nv[i].get<std::string>() : number_text(nv[i].get<double>());
        try {
          comps.push_back(parse_field_expr(mf, text));
        } catch (const ParseError& e) {
          throw ConfigError("'" + cp + "': " + e.what());
        }
      }
      normals.push_back(std::move(comps));
    }
    mf.normals = std::move(normals);
  }
  mf.validate_shape();
  return mf;
}

std::string point_text(const ChartPoint& u) {
  std::ostringstream os;
  os << "(";
  for (std::size_t a = 0; a < u.size(); ++a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", u[a]);
    os << (a ? ", " : "") << buf;
  }
  os << ")";
  return os.str();
}

void declared_antisymmetry(const EmbeddedManifold& mf, std::span<const ChartPoint> points) {
  if (mf.bracket.kind() != BracketStructure::Kind::PoissonTheta) return;
  const auto& theta = mf.bracket.poisson_declared();
  const std::size_t n = theta.size();
  for (const auto& u : points)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        const double x = theta[a][b].eval(u), y = theta[b][a].eval(u);
        if (std::abs(x + y) > 1e-12 * std::max(1.0, std::abs(x)))
          throw ConfigError("Poisson theta is not antisymmetric at entry (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");
      }
}

}  // namespace

EmbeddedManifold manifold_from_json(const json& doc) {
  const json& node = require(doc, "", "manifold");
  if (!node.is_object()) throw ConfigError("'manifold' must be an object");
  if (node.contains("builtin")) return builtin_from_json(node, "manifold");
  if (node.contains("custom")) return custom_from_json(node["custom"], "manifold.custom");
  throw ConfigError("missing key 'manifold.builtin' or 'manifold.custom'");
}

EmbeddedManifold from_config(const json& doc, const ConfigOptions& options) {
  EmbeddedManifold mf = manifold_from_json(doc);
  if (options.force) return mf;
  const auto points = sample_points(mf.domain, options.validation_points, options.seed);
  declared_antisymmetry(mf, points);
  const StructureReport r = validate_structure(mf, points, options.order);
  if (r.points == 0) throw ConfigError("structure validation failed: every sample point is degenerate");
  auto fail = [&](const std::string& what, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    throw ConfigError("structure validation failed: " + what + " residual " + buf + " (worst point u = " + point_text(r.worst_point) +
                      "); pass --force to skip validation");
  };
  if (!(r.worst.compatibility <= kStructureRejectThreshold)) fail("compatibility", r.worst.compatibility);
  if (r.worst.jacobi && !(*r.worst.jacobi <= kStructureRejectThreshold)) fail("Jacobi", *r.worst.jacobi);
  return mf;
}

EmbeddedManifold load_config(const std::filesystem::path& path, const ConfigOptions& options) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return from_config(doc, options);
}

}  // namespace bracketgeo
