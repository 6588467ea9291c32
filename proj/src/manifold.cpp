#include "bracketgeo/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "bracketgeo/error.hpp"

namespace bracketgeo {

namespace {

int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[static_cast<std::size_t>(p[i])]);
      sign = -sign;
    }
  }
  return sign;
}

// Uniform double in [0,1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

AmbientMetric AmbientMetric::diagonal(std::vector<int> signs) {
  if (signs.empty()) throw ConfigError("ambient metric needs at least one dimension");
  for (int s : signs) {
    if (s != 1 && s != -1) throw ConfigError("diagonal ambient metric entries must be +1 or -1");
  }
  AmbientMetric a;
  a.dim_ = static_cast<int>(signs.size());
  a.signs_ = std::move(signs);
  return a;
}

AmbientMetric AmbientMetric::general(std::vector<std::vector<Expr>> entries) {
  const std::size_t m = entries.size();
  if (m == 0) throw ConfigError("ambient metric needs at least one dimension");
  for (const auto& row : entries) {
    if (row.size() != m) throw ConfigError("general ambient metric must be square");
    for (const auto& e : row) {
      if (e.arity() != static_cast<int>(m)) throw ConfigError("ambient metric entries must be expressions in x1..xm");
    }
  }
  AmbientMetric a;
  a.dim_ = static_cast<int>(m);
  a.general_ = std::move(entries);
  return a;
}

const Expr& AmbientMetric::entry(int i, int j) const { return general_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

std::vector<Jet> AmbientMetric::eval_jets(std::span<const Jet> x) const {
  const auto m = static_cast<std::size_t>(dim_);
  if (x.size() != m) throw ShapeError("ambient metric expects " + std::to_string(m) + " coordinates");
  std::vector<Jet> out(m * m);
  if (is_diagonal()) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) out[i * m + j] = Jet::constant_like(i == j ? signs_[i] : 0.0, x[0]);
    return out;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      out[i * m + j] = general_[i][j].eval_jet(x);
      out[j * m + i] = out[i * m + j];
    }
  }
  return out;
}

std::vector<double> AmbientMetric::eval(std::span<const double> x) const {
  const auto m = static_cast<std::size_t>(dim_);
  std::vector<double> out(m * m, 0.0);
  if (is_diagonal()) {
    for (std::size_t i = 0; i < m; ++i) out[i * m + i] = signs_[i];
    return out;
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      out[i * m + j] = general_[i][j].eval(x);
      out[j * m + i] = out[i * m + j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

BracketStructure BracketStructure::nambu(Expr rho, int n) {
  if (n < 1) throw ConfigError("Nambu bracket needs chart dimension >= 1");
  if (rho.arity() != n) throw ConfigError("Nambu density must be an expression in u1..un");
  BracketStructure b;
  b.kind_ = Kind::NambuDensity;
  b.n_ = n;
  b.arity_ = n;
  b.antisymmetric_ = true;
  b.rho_ = rho;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    b.entries_.push_back({perm, Expr()});
    b.signs_.push_back(permutation_sign(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return b;
}

BracketStructure BracketStructure::poisson(std::vector<std::vector<Expr>> theta) {
  const std::size_t n = theta.size();
  if (n < 2) throw ConfigError("Poisson structure needs chart dimension >= 2");
  for (const auto& row : theta) {
    if (row.size() != n) throw ConfigError("Poisson theta must be square");
    for (const auto& e : row) {
      if (e.arity() != static_cast<int>(n)) throw ConfigError("Poisson theta entries must be expressions in u1..un");
    }
  }
  BracketStructure b;
  b.kind_ = Kind::PoissonTheta;
  b.n_ = static_cast<int>(n);
  b.arity_ = 2;
  b.antisymmetric_ = true;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t c = a + 1; c < n; ++c) {
      if (theta[a][c].is_zero_literal()) continue;
      b.entries_.push_back({{static_cast<int>(a), static_cast<int>(c)}, theta[a][c]});
      b.signs_.push_back(1);
      b.entries_.push_back({{static_cast<int>(c), static_cast<int>(a)}, theta[a][c]});
      b.signs_.push_back(-1);
    }
  }
  b.declared_ = std::move(theta);
  return b;
}

BracketStructure BracketStructure::multivector(int n, int arity, std::vector<Entry> entries, bool antisymmetric) {
  if (arity < 2 || arity > n + 1) throw ConfigError("multivector arity must satisfy 2 <= N+1 <= n+1");
  BracketStructure b;
  b.kind_ = Kind::Multivector;
  b.n_ = n;
  b.arity_ = arity;
  b.antisymmetric_ = antisymmetric;
  std::vector<std::vector<int>> seen;
  auto add = [&](std::vector<int> idx, const Expr& value, int sign) {
    if (std::find(seen.begin(), seen.end(), idx) != seen.end()) throw ConfigError("multivector entry listed twice (after antisymmetric expansion)");
    seen.push_back(idx);
    b.entries_.push_back({std::move(idx), value});
    b.signs_.push_back(sign);
  };
  for (auto& e : entries) {
    if (static_cast<int>(e.index.size()) != arity) throw ConfigError("multivector entry index has wrong length");
    for (int a : e.index) {
      if (a < 0 || a >= n) throw ConfigError("multivector entry index out of range");
    }
    if (e.value.arity() != n) throw ConfigError("multivector entries must be expressions in u1..un");
    if (e.value.is_zero_literal()) continue;
    if (!antisymmetric) {
      add(e.index, e.value, 1);
      continue;
    }
    std::vector<int> sorted = e.index;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ConfigError("antisymmetric multivector entry repeats an index");
    // sign of the listed index relative to the sorted one
    std::vector<int> rank(e.index.size());
    for (std::size_t k = 0; k < e.index.size(); ++k)
      rank[k] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), e.index[k]) - sorted.begin());
    const int base_sign = permutation_sign(rank);
    std::vector<int> perm(e.index.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<int> idx(perm.size());
      for (std::size_t k = 0; k < perm.size(); ++k) idx[k] = sorted[static_cast<std::size_t>(perm[k])];
      add(idx, e.value, base_sign * permutation_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return b;
}

// ---------------------------------------------------------------------------

std::vector<ChartPoint> sample_points(const ChartDomain& domain, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ChartPoint> pts;
  pts.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int p = 0; p < count; ++p) {
    ChartPoint u;
    for (const auto& [lo, hi] : domain.box) {
      const double a = lo + domain.margin, b = hi - domain.margin;
      u.push_back(a + (b - a) * unit_uniform(rng));
    }
    pts.push_back(std::move(u));
  }
  return pts;
}

std::vector<ChartPoint> grid_points(const ChartDomain& domain, std::span<const int> counts) {
  if (counts.size() != domain.box.size()) throw ConfigError("grid needs one count per chart axis");
  std::size_t total = 1;
  for (int c : counts) {
    if (c < 1) throw ConfigError("grid counts must be positive");
    total *= static_cast<std::size_t>(c);
  }
  std::vector<ChartPoint> pts;
  pts.reserve(total);
  std::vector<int> idx(counts.size(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    ChartPoint u;
    for (std::size_t a = 0; a < counts.size(); ++a) {
      const double lo = domain.box[a].first + domain.margin, hi = domain.box[a].second - domain.margin;
      u.push_back(counts[a] == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx[a] / (counts[a] - 1));
    }
    pts.push_back(std::move(u));
    for (std::size_t a = counts.size(); a-- > 0;) {
      if (++idx[a] < counts[a]) break;
      idx[a] = 0;
    }
  }
  return pts;
}

// ---------------------------------------------------------------------------

void EmbeddedManifold::validate_shape() const {
  if (n < 1) throw ConfigError("chart dimension n must be >= 1");
  if (m < n) throw ConfigError("ambient dimension m must be >= n");
  if (static_cast<int>(embedding.size()) != m) throw ConfigError("embedding must have m = " + std::to_string(m) + " components");
  for (const auto& e : embedding) {
    if (e.arity() != n) throw ConfigError("embedding components must be expressions in u1..un");
  }
  if (ambient.dim() != m) throw ConfigError("ambient metric dimension does not match m");
  if (bracket.chart_dim() != n) throw ConfigError("bracket structure chart dimension does not match n");
  const int big_n = bracket.order_n();
  if (big_n < 1 || big_n > n) throw ConfigError("bracket arity N+1 must satisfy 1 <= N <= n");
  if (normals) {
    if (static_cast<int>(normals->size()) > m - n) throw ConfigError("at most m - n normal fields may be declared");
    for (const auto& nv : *normals) {
      if (static_cast<int>(nv.size()) != m) throw ConfigError("normal fields must have m components");
      for (const auto& e : nv) {
        if (e.arity() != n + m) throw ConfigError("normal components must be field expressions in u1..un, x1..xm");
      }
    }
  }
  if (static_cast<int>(domain.box.size()) != n) throw ConfigError("chart domain must have one interval per chart axis");
  for (const auto& [lo, hi] : domain.box) {
    if (!(hi - lo > 2 * domain.margin)) throw ConfigError("chart domain interval is empty after applying the margin");
  }
}

std::vector<Jet> chart_jets(std::span<const double> u, int order) {
  std::vector<Jet> out;
  const int n = static_cast<int>(u.size());
  for (int a = 0; a < n; ++a) out.push_back(Jet::variable(a, u[static_cast<std::size_t>(a)], n, order));
  return out;
}

std::vector<Jet> embedding_jets(const EmbeddedManifold& mfld, std::span<const double> u, int order) {
  auto vars = chart_jets(u, order);
  std::vector<Jet> out;
  out.reserve(mfld.embedding.size());
  for (const auto& e : mfld.embedding) out.push_back(e.eval_jet(vars));
  return out;
}

Expr parse_field_expr(const EmbeddedManifold& mfld, std::string_view text) {
  auto names = mfld.chart_names();
  auto amb = mfld.ambient_names();
  names.insert(names.end(), amb.begin(), amb.end());
  return parse(text, names);
}

Jet eval_field_expr(const Expr& e, std::span<const Jet> chart, std::span<const Jet> x) {
  std::vector<Jet> args(chart.begin(), chart.end());
  args.insert(args.end(), x.begin(), x.end());
  return e.eval_jet(args);
}

}  // namespace bracketgeo
