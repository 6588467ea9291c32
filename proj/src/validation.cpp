#include "bracketgeo/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bracketgeo/bracket.hpp"
#include "bracketgeo/error.hpp"
#include "bracketgeo/jet_matrix.hpp"
#include "bracketgeo/oracle.hpp"

namespace bracketgeo {

namespace {

using Table = std::map<std::vector<int>, Jet>;

Table theta_table(const PointFrame& frame) {
  Table t;
  const auto& entries = frame.manifold().bracket.entries();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    auto [it, fresh] = t.try_emplace(entries[e].index, frame.theta()[e]);
    if (!fresh) it->second += frame.theta()[e];
  }
  return t;
}

double compatibility_from(const PointFrame& frame, const Oracle& oracle) {
  const int m = frame.m(), n = frame.n(), big_n = frame.big_n();
  const auto p = p_tensor(frame);
  const auto tuples = multi_indices(m, big_n, false);
  const std::size_t nt = tuples.size();
  const auto& eta = frame.eta_values();
  // eta_IJ as a product of metric entries over the slots.
  std::vector<double> eta_tuple(nt * nt, 1.0);
  for (std::size_t a = 0; a < nt; ++a)
    for (std::size_t b = 0; b < nt; ++b)
      for (int k = 0; k < big_n; ++k)
        eta_tuple[a * nt + b] *= eta[static_cast<std::size_t>(tuples[a][static_cast<std::size_t>(k)] * m + tuples[b][static_cast<std::size_t>(k)])];
  std::vector<double> pp(static_cast<std::size_t>(m * m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0;
      for (std::size_t a = 0; a < nt; ++a)
        for (std::size_t b = 0; b < nt; ++b) {
          const double w = eta_tuple[a * nt + b];
          if (w != 0) s += p[static_cast<std::size_t>(i) * nt + a] * p[static_cast<std::size_t>(j) * nt + b] * w;
        }
      pp[static_cast<std::size_t>(i * m + j)] = s;
    }
  double scale = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) scale += pp[static_cast<std::size_t>(i * m + j)] * eta[static_cast<std::size_t>(i * m + j)];
  scale /= n;
  if (std::abs(scale) < kDegenerateScale) throw DegenerateError("bracket scale vanishes");

  std::vector<std::vector<double>> e;
  for (int a = 0; a < n; ++a) e.push_back(oracle.basis(a));
  double worst = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double g = 0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          g += oracle.metric().inv_value(a, b) * e[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
      worst = std::max(worst, std::abs(pp[static_cast<std::size_t>(i * m + j)] / scale - g));
    }
  return worst;
}

double antisymmetry_of(const Table& t) {
  double worst = 0;
  for (const auto& [index, value] : t) {
    for (std::size_t p = 0; p < index.size(); ++p)
      for (std::size_t q = p + 1; q < index.size(); ++q) {
        auto swapped = index;
        std::swap(swapped[p], swapped[q]);
        const auto it = t.find(swapped);
        const double other = it == t.end() ? 0.0 : it->second.value();
        worst = std::max(worst, std::abs(value.value() + other));
      }
  }
  return worst;
}

double jacobi_of(const Table& t, int n) {
  auto th = [&](int a, int b) -> const Jet* {
    const auto it = t.find({a, b});
    return it == t.end() ? nullptr : &it->second;
  };
  auto term = [&](int a, int b, int c) {
    double s = 0;
    const Jet* bc = th(b, c);
    if (!bc) return 0.0;
    for (int p = 0; p < n; ++p)
      if (const Jet* ap = th(a, p)) s += ap->value() * bc->partial1(p);
    return s;
  };
  double worst = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) worst = std::max(worst, std::abs(term(a, b, c) + term(b, c, a) + term(c, a, b)));
  return worst;
}

double divergence_of(const Table& t, const Jet& rho) {
  std::map<std::vector<int>, double> acc;
  for (const auto& [index, value] : t) {
    const Jet f = rho * value;
    std::vector<int> rest(index.begin() + 1, index.end());
    acc[rest] += f.partial1(index[0]);
  }
  double worst = 0;
  for (const auto& [rest, v] : acc) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace

double verify_compatibility(const EmbeddedManifold& mfld, std::span<const double> u, int order) {
  PointFrame frame(mfld, u, {order, false});
  Oracle oracle(mfld, u, std::max(order, 3));
  return compatibility_from(frame, oracle);
}

StructureCheck check_structure_at(const EmbeddedManifold& mfld, std::span<const double> u, int order) {
  PointFrame frame(mfld, u, {order, false});
  Oracle oracle(mfld, u, std::max(order, 3));
  const BracketStructure& br = mfld.bracket;
  const int n = mfld.n;
  const Table t = theta_table(frame);

  StructureCheck c;
  c.compatibility = compatibility_from(frame, oracle);
  c.antisymmetry = antisymmetry_of(t);

  if (br.arity() == 2) {
    c.jacobi = jacobi_of(t, n);

    const double eps = frame.epsilon();
    const double gamma = std::sqrt(frame.gamma2());
    std::vector<double> j(static_cast<std::size_t>(n * n), 0.0);
    for (const auto& [index, value] : t)
      for (int b = 0; b < n; ++b)
        j[static_cast<std::size_t>(index[0] * n + b)] += eps / gamma * value.value() * oracle.metric().value(index[1], b);
    double worst = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double s = a == b ? eps : 0.0;
        for (int k = 0; k < n; ++k) s += j[static_cast<std::size_t>(a * n + k)] * j[static_cast<std::size_t>(k * n + b)];
        worst = std::max(worst, std::abs(s));
      }
    c.j_square = worst;
  }

  if (br.kind() == BracketStructure::Kind::NambuDensity) {
    c.divergence_free = divergence_of(t, br.rho().eval_jet(frame.chart()));
  } else if (br.arity() == 2 && br.antisymmetric() && n % 2 == 0) {
    std::vector<Jet> full(static_cast<std::size_t>(n * n), Jet::constant(0.0, n, order));
    for (const auto& [index, value] : t) full[static_cast<std::size_t>(index[0] * n + index[1])] = value;
    const Jet det = jet_determinant(full, n);
    if (det.value() > kDegenerateScale) c.divergence_free = divergence_of(t, reciprocal(sqrt(det)));
  }
  return c;
}

StructureReport validate_structure(const EmbeddedManifold& mfld, std::span<const ChartPoint> points, int order) {
  StructureReport r;
  double worst_key = -1;
  auto bump = [](std::optional<double>& into, const std::optional<double>& v) {
    if (v) into = std::max(into.value_or(0.0), *v);
  };
  for (const auto& u : points) {
    StructureCheck c;
    try {
      c = check_structure_at(mfld, u, order);
    } catch (const DegenerateError&) {
      ++r.degenerate;
      continue;
    } catch (const DomainError&) {
      ++r.degenerate;
      continue;
    }
    ++r.points;
    const double key = std::max(c.compatibility, c.jacobi.value_or(0.0));
    if (key > worst_key) {
      worst_key = key;
      r.worst_point = u;
    }
    r.worst.compatibility = std::max(r.worst.compatibility, c.compatibility);
    r.worst.antisymmetry = std::max(r.worst.antisymmetry, c.antisymmetry);
    bump(r.worst.jacobi, c.jacobi);
    bump(r.worst.divergence_free, c.divergence_free);
    bump(r.worst.j_square, c.j_square);
  }
  return r;
}

}  // namespace bracketgeo
