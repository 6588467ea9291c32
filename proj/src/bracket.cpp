#include "bracketgeo/bracket.hpp"

#include <cmath>
#include <numeric>

#include "bracketgeo/error.hpp"
#include "bracketgeo/jet_matrix.hpp"

namespace bracketgeo {

namespace {

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::vector<MultiIndex> multi_indices(int m, int big_n, bool sorted_only) {
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<std::size_t>(big_n), 0);
  if (sorted_only) {
    if (big_n > m) return out;
    std::iota(cur.begin(), cur.end(), 0);
    while (true) {
      out.push_back(cur);
      int k = big_n - 1;
      while (k >= 0 && cur[static_cast<std::size_t>(k)] == m - big_n + k) --k;
      if (k < 0) break;
      ++cur[static_cast<std::size_t>(k)];
      for (int j = k + 1; j < big_n; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
  }
  while (true) {
    out.push_back(cur);
    int k = big_n - 1;
    while (k >= 0 && cur[static_cast<std::size_t>(k)] == m - 1) cur[static_cast<std::size_t>(k--)] = 0;
    if (k < 0) break;
    ++cur[static_cast<std::size_t>(k)];
  }
  return out;
}

PointFrame::PointFrame(const EmbeddedManifold& mfld, std::span<const double> u, FrameOptions options)
    : mfld_(&mfld), options_(options), u_(u.begin(), u.end()) {
  const BracketStructure& br = mfld.bracket;
  if (static_cast<int>(u.size()) != mfld.n) throw ShapeError("chart point has wrong dimension");
  if (options.order < 2) throw ShapeError("bracket frames need jet order >= 2");
  if (options.fast_path && !br.antisymmetric()) throw ApplicabilityError("antisymmetry fast path requested for a structure not declared antisymmetric");

  const int n = mfld.n, m = mfld.m, big_n = br.order_n();
  const int order = options.order;
  chart_ = chart_jets(u, order);
  x_.reserve(static_cast<std::size_t>(m));
  for (const auto& e : mfld.embedding) x_.push_back(e.eval_jet(chart_));

  const auto& entries = br.entries();
  const auto& signs = br.entry_signs();
  if (br.kind() == BracketStructure::Kind::NambuDensity) {
    const Jet rho = br.rho().eval_jet(chart_);
    if (rho.value() == 0.0) throw DegenerateError("Nambu density vanishes at the chart point");
    const Jet inv = reciprocal(rho);
    for (std::size_t e = 0; e < entries.size(); ++e) theta_.push_back(inv * static_cast<double>(signs[e]));
  } else {
    for (std::size_t e = 0; e < entries.size(); ++e) {
      Jet v = entries[e].value.eval_jet(chart_, n, order);
      theta_.push_back(signs[e] == 1 ? v : v * static_cast<double>(signs[e]));
    }
  }

  // Ambient metric at x(u).
  const auto mm = static_cast<std::size_t>(m);
  eta_ = mfld.ambient.eval_jets(x_);
  if (mfld.ambient.is_diagonal()) {
    eta_inv_ = eta_;
  } else {
    eta_inv_ = jet_inverse(eta_, m);
  }
  eta_val_ = jet_values(eta_);
  eta_inv_val_ = jet_values(eta_inv_);

  tuples_ = multi_indices(m, big_n, options.fast_path);
  std::vector<std::vector<Jet>> dx(mm);
  for (std::size_t i = 0; i < mm; ++i)
    for (int a = 0; a < n; ++a) dx[i].push_back(x_[i].derivative(a));

  q_.assign(tuples_.size() * static_cast<std::size_t>(n), Jet::constant(0.0, n, order - 1));
  for (std::size_t t = 0; t < tuples_.size(); ++t) {
    const auto& tuple = tuples_[t];
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto& index = entries[e].index;
      Jet term = theta_[e];
      for (int k = 0; k < big_n; ++k) {
        term *= dx[static_cast<std::size_t>(tuple[static_cast<std::size_t>(k)])][static_cast<std::size_t>(index[static_cast<std::size_t>(k + 1)])];
      }
      q_[t * static_cast<std::size_t>(n) + static_cast<std::size_t>(index[0])] += term;
    }
  }

  build_weights();

  xrows_.reserve(mm);
  for (std::size_t i = 0; i < mm; ++i) xrows_.push_back(row(x_[i]));

  pp_.resize(mm * mm);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      pp_[idx(i, j)] = contract(xrows_[static_cast<std::size_t>(i)], xrows_[static_cast<std::size_t>(j)]);
      pp_[idx(j, i)] = pp_[idx(i, j)];
    }
  }
  s_ = Jet::constant_like(0.0, pp_[0]);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) s_.fma(pp_[idx(i, j)], eta(i, j));
  s_ /= static_cast<double>(n);
  if (std::abs(s_.value()) < kDegenerateScale) throw DegenerateError("bracket scale gamma^2 vanishes at the chart point");
  inv_s_ = reciprocal(s_);

  d_.resize(mm * mm);
  pi_.resize(mm * mm);
  for (std::size_t k = 0; k < mm * mm; ++k) {
    d_[k] = pp_[k] * inv_s_;
    pi_[k] = eta_inv_[k] - d_[k];
  }
}

void PointFrame::build_weights() {
  const int big_n = this->big_n();
  const double inv_fact = 1.0 / factorial(big_n);
  const bool diagonal = mfld_->ambient.is_diagonal();
  const Jet& like = eta_[0];
  auto diag_sign = [&](const MultiIndex& t) {
    double s = 1;
    for (int i : t) s *= eta_val_[idx(i, i)];
    return s;
  };
  if (diagonal) {
    const double scale = options_.fast_path ? 1.0 : inv_fact;
    for (std::size_t t = 0; t < tuples_.size(); ++t) weights_.push_back({t, t, Jet::constant_like(scale * diag_sign(tuples_[t]), like)});
    return;
  }
  const auto nn = static_cast<std::size_t>(big_n);
  for (std::size_t t = 0; t < tuples_.size(); ++t) {
    for (std::size_t s = 0; s < tuples_.size(); ++s) {
      const auto& ti = tuples_[t];
      const auto& sj = tuples_[s];
      if (!options_.fast_path) {
        Jet w = Jet::constant_like(inv_fact, like);
        for (std::size_t k = 0; k < nn; ++k) w *= eta(ti[k], sj[k]);
        weights_.push_back({t, s, std::move(w)});
        continue;
      }
      std::vector<Jet> sub;
      sub.reserve(nn * nn);
      for (std::size_t a = 0; a < nn; ++a)
        for (std::size_t b = 0; b < nn; ++b) sub.push_back(eta(ti[a], sj[b]));
      weights_.push_back({t, s, jet_determinant(sub, big_n)});
    }
  }
}

std::vector<Jet> PointFrame::row(const Jet& f) const {
  const int n = this->n();
  std::vector<Jet> df;
  df.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) df.push_back(f.derivative(a));
  std::vector<Jet> out;
  out.reserve(tuples_.size());
  for (std::size_t t = 0; t < tuples_.size(); ++t) {
    Jet r = df[0] * q_[t * static_cast<std::size_t>(n)];
    for (int a = 1; a < n; ++a) r.fma(df[static_cast<std::size_t>(a)], q_[t * static_cast<std::size_t>(n) + static_cast<std::size_t>(a)]);
    out.push_back(std::move(r));
  }
  return out;
}

Jet PointFrame::row_entry(const Jet& f, std::size_t t) const {
  const auto n = static_cast<std::size_t>(this->n());
  Jet r = f.derivative(0) * q_[t * n];
  for (std::size_t a = 1; a < n; ++a) r.fma(f.derivative(static_cast<int>(a)), q_[t * n + a]);
  return r;
}

Jet PointFrame::contract(std::span<const Jet> a, std::span<const Jet> b) const {
  if (a.size() != tuples_.size() || b.size() != tuples_.size()) throw ShapeError("row length does not match the frame's multi-index set");
  Jet sum = Jet::constant_like(0.0, a[0]);
  for (const auto& w : weights_) {
    Jet term = a[w.t] * b[w.s];
    sum.fma(term, w.w);
  }
  return sum;
}

std::vector<double> PointFrame::d_values() const { return jet_values(d_); }
std::vector<double> PointFrame::pi_values() const { return jet_values(pi_); }

Jet PointFrame::d_of(int i, const Jet& f) const { return contract(xrows_[static_cast<std::size_t>(i)], row(f)) * inv_s_; }

std::vector<Jet> PointFrame::d_of(const Jet& f) const {
  const auto rf = row(f);
  std::vector<Jet> out;
  out.reserve(static_cast<std::size_t>(m()));
  for (int i = 0; i < m(); ++i) out.push_back(contract(xrows_[static_cast<std::size_t>(i)], rf) * inv_s_);
  return out;
}

std::vector<double> PointFrame::lower(std::span<const double> v) const {
  const auto mm = static_cast<std::size_t>(m());
  std::vector<double> out(mm, 0.0);
  for (std::size_t i = 0; i < mm; ++i)
    for (std::size_t j = 0; j < mm; ++j) out[i] += eta_val_[i * mm + j] * v[j];
  return out;
}

double PointFrame::inner(std::span<const double> a, std::span<const double> b) const {
  const auto lb = lower(b);
  double s = 0;
  for (std::size_t i = 0; i < lb.size(); ++i) s += a[i] * lb[i];
  return s;
}

std::vector<double> PointFrame::project_tangent(std::span<const double> v) const {
  const auto mm = static_cast<std::size_t>(m());
  const auto lv = lower(v);
  std::vector<double> out(mm, 0.0);
  for (std::size_t i = 0; i < mm; ++i)
    for (std::size_t j = 0; j < mm; ++j) out[i] += d_[i * mm + j].value() * lv[j];
  return out;
}

std::vector<double> PointFrame::project_normal(std::span<const double> v) const {
  const auto t = project_tangent(v);
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= t[i];
  return out;
}

double PointFrame::local_scale() const {
  const double inv_sqrt = 1.0 / std::sqrt(factorial(big_n()));
  double pmax = 0;
  for (const auto& r : xrows_)
    for (const auto& j : r) pmax = std::max(pmax, std::abs(j.value()) * inv_sqrt);
  return std::max(1.0, pmax * pmax);
}

Jet bracket_apply(const PointFrame& frame, std::span<const Jet> f) {
  const BracketStructure& br = frame.manifold().bracket;
  if (static_cast<int>(f.size()) != br.arity()) {
    throw ShapeError("bracket expects " + std::to_string(br.arity()) + " arguments, got " + std::to_string(f.size()));
  }
  const int n = frame.n();
  std::vector<std::vector<Jet>> df(f.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    for (int a = 0; a < n; ++a) df[k].push_back(f[k].derivative(a));
  const auto& entries = br.entries();
  Jet sum = Jet::constant_like(0.0, df[0][0]);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    Jet term = frame.theta()[e];
    for (std::size_t k = 0; k < f.size(); ++k) term *= df[k][static_cast<std::size_t>(entries[e].index[k])];
    sum += term;
  }
  return sum;
}

std::vector<double> p_tensor(const PointFrame& frame) {
  const int m = frame.m(), big_n = frame.big_n();
  const auto tuples = multi_indices(m, big_n, false);
  const double inv_sqrt = 1.0 / std::sqrt(factorial(big_n));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m) * tuples.size());
  std::vector<Jet> args(static_cast<std::size_t>(big_n + 1));
  for (int i = 0; i < m; ++i) {
    args[0] = frame.x()[static_cast<std::size_t>(i)];
    for (const auto& t : tuples) {
      for (int k = 0; k < big_n; ++k) args[static_cast<std::size_t>(k + 1)] = frame.x()[static_cast<std::size_t>(t[static_cast<std::size_t>(k)])];
      out.push_back(bracket_apply(frame, args).value() * inv_sqrt);
    }
  }
  return out;
}

GammaEps gamma_eps(const PointFrame& frame) { return {frame.gamma2(), frame.epsilon()}; }

ProjectionResiduals projection_residuals(const PointFrame& frame) {
  const int m = frame.m(), n = frame.n();
  const auto mm = static_cast<std::size_t>(m);
  const auto& eta = frame.eta_values();
  const auto dup = frame.d_values();
  const auto piup = frame.pi_values();
  // mixed forms D^i_j = D^{ik} eta_kj
  std::vector<double> dm(mm * mm, 0.0), pm(mm * mm, 0.0);
  for (std::size_t i = 0; i < mm; ++i)
    for (std::size_t j = 0; j < mm; ++j)
      for (std::size_t k = 0; k < mm; ++k) {
        dm[i * mm + j] += dup[i * mm + k] * eta[k * mm + j];
        pm[i * mm + j] += piup[i * mm + k] * eta[k * mm + j];
      }
  ProjectionResiduals r{};
  double tr = 0;
  for (std::size_t i = 0; i < mm; ++i) {
    tr += dm[i * mm + i];
    for (std::size_t j = 0; j < mm; ++j) {
      double sq = 0, lowered_ij = 0, lowered_ji = 0;
      for (std::size_t k = 0; k < mm; ++k) {
        sq += dm[i * mm + k] * dm[k * mm + j];
        lowered_ij += eta[i * mm + k] * dm[k * mm + j];
        lowered_ji += eta[j * mm + k] * dm[k * mm + i];
      }
      r.idempotency = std::max(r.idempotency, std::abs(sq - dm[i * mm + j]));
      r.eta_symmetry = std::max(r.eta_symmetry, std::abs(lowered_ij - lowered_ji));
      r.complement = std::max(r.complement, std::abs(dm[i * mm + j] + pm[i * mm + j] - (i == j ? 1.0 : 0.0)));
    }
  }
  r.trace = std::abs(tr - n);
  for (int a = 0; a < n; ++a) {
    std::vector<double> e(mm);
    for (std::size_t i = 0; i < mm; ++i) e[i] = frame.x()[i].partial1(a);
    for (std::size_t i = 0; i < mm; ++i) {
      double de = 0, pe = 0;
      for (std::size_t j = 0; j < mm; ++j) {
        de += dm[i * mm + j] * e[j];
        pe += pm[i * mm + j] * e[j];
      }
      r.tangent_fix = std::max(r.tangent_fix, std::abs(de - e[i]));
      r.normal_kill = std::max(r.normal_kill, std::abs(pe));
    }
  }
  return r;
}

}  // namespace bracketgeo
