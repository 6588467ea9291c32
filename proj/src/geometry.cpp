#include "bracketgeo/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "bracketgeo/error.hpp"
#include "bracketgeo/jet_matrix.hpp"

namespace bracketgeo {

namespace {

std::size_t at2(int i, int j, int m) { return static_cast<std::size_t>(i * m + j); }
std::size_t at3(int i, int j, int k, int m) { return static_cast<std::size_t>((i * m + j) * m + k); }
std::size_t at4(int i, int j, int k, int l, int m) { return static_cast<std::size_t>(((i * m + j) * m + k) * m + l); }

double max_abs(std::span<const double> v) {
  double r = 0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

void check_size(std::size_t got, int m, const char* what) {
  if (got != static_cast<std::size_t>(m)) throw ShapeError(std::string(what) + ": expected " + std::to_string(m) + " components");
}

Jet zero_jet(const PointFrame& f, int order) { return Jet::constant(0.0, f.n(), order); }

// gamma^p as a chart jet, gamma = sqrt(epsilon * s).
Jet gamma_power(const PointFrame& f, double p) {
  Jet g2 = f.trace_scale() * static_cast<double>(f.epsilon());
  return pow(g2, p / 2.0);
}

}  // namespace

ConnectionContext::ConnectionContext(const EmbeddedManifold& mfld, std::span<const double> u, FrameOptions options)
    : frame_(mfld, u, options), flat_(mfld.ambient.is_diagonal()) {
  const int m = frame_.m();
  const int n = frame_.n();
  const int k_order = frame_.order();
  const auto mm = static_cast<std::size_t>(m);
  rbar_.assign(mm * mm * mm * mm, 0.0);
  if (flat_) {
    gamma_.assign(mm * mm * mm, zero_jet(frame_, k_order - 1));
    return;
  }

  // Mixed jets in (u, y): the ambient metric is evaluated at x(u) + y so that
  // derivatives along y are ambient partials, then restricted back to y = 0.
  const int dim = n + m;
  std::vector<Jet> z;
  for (int k = 0; k < m; ++k) z.push_back(frame_.x()[static_cast<std::size_t>(k)].widened(dim) + Jet::variable(n + k, 0.0, dim, k_order));
  const std::vector<Jet> eta = mfld.ambient.eval_jets(z);
  std::vector<Jet> eta_inv;
  try {
    eta_inv = jet_inverse(eta, m);
  } catch (const DomainError&) {
    throw DegenerateError("ambient metric is singular at x(u)");
  }
  std::vector<Jet> deta(mm * mm * mm);  // deta[(a*m+b)*m+c] = d_c eta_ab
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) deta[at3(a, b, c, m)] = eta[at2(a, b, m)].derivative(n + c);

  std::vector<Jet> mixed(mm * mm * mm);
  gamma_.resize(mm * mm * mm);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = j; k < m; ++k) {
        Jet s = Jet::constant(0.0, dim, k_order - 1);
        for (int l = 0; l < m; ++l) s.fma(eta_inv[at2(i, l, m)], deta[at3(l, k, j, m)] + deta[at3(l, j, k, m)] - deta[at3(j, k, l, m)]);
        s *= 0.5;
        mixed[at3(i, j, k, m)] = s;
        mixed[at3(i, k, j, m)] = s;
        gamma_[at3(i, j, k, m)] = s.restricted(n);
        gamma_[at3(i, k, j, m)] = gamma_[at3(i, j, k, m)];
      }

  std::vector<double> up(mm * mm * mm * mm, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double r = mixed[at3(i, l, j, m)].partial1(n + k) - mixed[at3(i, k, j, m)].partial1(n + l);
          for (int p = 0; p < m; ++p)
            r += mixed[at3(i, k, p, m)].value() * mixed[at3(p, l, j, m)].value() -
                 mixed[at3(i, l, p, m)].value() * mixed[at3(p, k, j, m)].value();
          up[at4(i, j, k, l, m)] = r;
        }
  const auto& ev = frame_.eta_values();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double s = 0;
          for (int p = 0; p < m; ++p) s += ev[at2(i, p, m)] * up[at4(p, j, k, l, m)];
          rbar_[at4(i, j, k, l, m)] = s;
        }
}

double ConnectionContext::ambient_riemann(int i, int j, int k, int l) const { return rbar_[at4(i, j, k, l, m())]; }

std::vector<Jet> ConnectionContext::nabla_vector(std::span<const Jet> y) const {
  const int m = this->m();
  check_size(y.size(), m, "nabla_vector");
  std::vector<Jet> out(static_cast<std::size_t>(m * m));
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < m; ++i) {
      Jet v = frame_.d_of(c, y[static_cast<std::size_t>(i)]);
      if (!flat_) {
        for (int p = 0; p < m; ++p) {
          Jet g = zero_jet(frame_, v.order());
          for (int q = 0; q < m; ++q) g.fma(christoffel(i, p, q), y[static_cast<std::size_t>(q)]);
          v.fma(frame_.d(c, p), g);
        }
      }
      out[at2(c, i, m)] = std::move(v);
    }
  return out;
}

std::vector<Jet> ConnectionContext::nabla_tensor(std::span<const Jet> w) const {
  const int m = this->m();
  check_size(w.size(), m * m, "nabla_tensor");
  std::vector<Jet> out(static_cast<std::size_t>(m * m * m));
  for (int c = 0; c < m; ++c)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        Jet v = frame_.d_of(c, w[at2(j, k, m)]);
        if (!flat_) {
          for (int p = 0; p < m; ++p) {
            Jet g = zero_jet(frame_, v.order());
            for (int q = 0; q < m; ++q) {
              g.fma(christoffel(j, p, q), w[at2(q, k, m)]);
              g.fma(christoffel(k, p, q), w[at2(j, q, m)]);
            }
            v.fma(frame_.d(c, p), g);
          }
        }
        out[at3(c, j, k, m)] = std::move(v);
      }
  return out;
}

const std::vector<Jet>& ConnectionContext::pi_derivative() const {
  if (!t_) {
    const int m = this->m();
    std::vector<Jet> pi;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) pi.push_back(frame_.pi(i, j));
    t_ = nabla_tensor(pi);
  }
  return *t_;
}

const std::vector<double>& ConnectionContext::pi_derivative_lowered() const {
  if (!l_) {
    const int m = this->m();
    const auto& t = pi_derivative();
    const auto& ev = frame_.eta_values();
    const auto mm = static_cast<std::size_t>(m);
    std::vector<double> tv(mm * mm * mm);
    for (std::size_t q = 0; q < tv.size(); ++q) tv[q] = t[q].value();
    // Lower one index at a time.
    std::vector<double> a(tv.size(), 0.0), b(tv.size(), 0.0), c(tv.size(), 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int p = 0; p < m; ++p) a[at3(i, j, k, m)] += ev[at2(i, p, m)] * tv[at3(p, j, k, m)];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int p = 0; p < m; ++p) b[at3(i, j, k, m)] += ev[at2(j, p, m)] * a[at3(i, p, k, m)];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int p = 0; p < m; ++p) c[at3(i, j, k, m)] += ev[at2(k, p, m)] * b[at3(i, j, p, m)];
    l_ = std::move(c);
  }
  return *l_;
}

Field ConnectionContext::lower(std::span<const Jet> v) const {
  const int m = this->m();
  check_size(v.size(), m, "lower");
  Field out;
  for (int i = 0; i < m; ++i) {
    Jet s = zero_jet(frame_, v[0].order());
    for (int j = 0; j < m; ++j) s.fma(frame_.eta(i, j), v[static_cast<std::size_t>(j)]);
    out.push_back(std::move(s));
  }
  return out;
}

Jet ConnectionContext::inner(std::span<const Jet> a, std::span<const Jet> b) const {
  const Field lb = lower(b);
  Jet s = zero_jet(frame_, std::min(a[0].order(), lb[0].order()));
  for (std::size_t i = 0; i < a.size(); ++i) s.fma(a[i], lb[i]);
  return s;
}

void ConnectionContext::require(std::span<const double> v, Character c, const char* what) const {
  check_size(v.size(), m(), what);
  if (c == Character::General) return;
  const auto off = c == Character::Tangent ? frame_.project_normal(v) : frame_.project_tangent(v);
  const double tol = kCharacterTolerance * std::max(1.0, max_abs(v));
  if (max_abs(off) > tol)
    throw CharacterError(std::string(what) + (c == Character::Tangent ? " is not tangent" : " is not normal") + " (off-component " +
                         std::to_string(max_abs(off)) + ")");
}

const std::vector<double>& ConnectionContext::riemann_tensor() const {
  if (!riemann_) {
    const int m = this->m();
    const auto& l = pi_derivative_lowered();
    const auto& ei = frame_.eta_inv_values();
    const auto mm = static_cast<std::size_t>(m);
    // q[(k*m+i)*m+l*m+j] style contraction: c(k,i,l,j) = L_{k,mi} eta^{mm'} L_{l,m'j}
    std::vector<double> raised(mm * mm * mm, 0.0);  // L_{l,}^{m}_{j}
    for (int c = 0; c < m; ++c)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int p = 0; p < m; ++p) raised[at3(c, a, b, m)] += ei[at2(a, p, m)] * l[at3(c, p, b, m)];
    std::vector<double> r(mm * mm * mm * mm);
    auto contract = [&](int k, int i, int ll, int j) {
      double s = 0;
      for (int p = 0; p < m; ++p) s += l[at3(k, p, i, m)] * raised[at3(ll, p, j, m)];
      return s;
    };
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int ll = 0; ll < m; ++ll)
            r[at4(i, j, k, ll, m)] = rbar_[at4(i, j, k, ll, m)] + contract(k, i, ll, j) - contract(ll, i, k, j);
    riemann_ = std::move(r);
  }
  return *riemann_;
}

Vector values(std::span<const Jet> f) {
  Vector v;
  v.reserve(f.size());
  for (const auto& j : f) v.push_back(j.value());
  return v;
}

Field hat_grad(const ConnectionContext& ctx, const Jet& f) { return ctx.frame().d_of(f); }

Vector hat_nabla_along(const ConnectionContext& ctx, std::span<const double> x, std::span<const Jet> y) {
  const int m = ctx.m();
  check_size(x.size(), m, "direction");
  const Vector xl = ctx.lower(x);
  const auto h = ctx.nabla_vector(y);
  Vector out(static_cast<std::size_t>(m), 0.0);
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] += xl[static_cast<std::size_t>(c)] * h[at2(c, i, m)].value();
  return out;
}

Vector levi_civita(const ConnectionContext& ctx, std::span<const double> x, std::span<const Jet> y) {
  ctx.require(x, Character::Tangent, "X");
  ctx.require(values(y), Character::Tangent, "Y");
  return ctx.frame().project_tangent(hat_nabla_along(ctx, x, y));
}

Vector second_fundamental(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y) {
  ctx.require(x, Character::Tangent, "X");
  ctx.require(y, Character::Tangent, "Y");
  const int m = ctx.m();
  const Vector xl = ctx.lower(x), yl = ctx.lower(y);
  const auto& t = ctx.pi_derivative();
  Vector out(static_cast<std::size_t>(m), 0.0);
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < m; ++i)
      for (int b = 0; b < m; ++b)
        out[static_cast<std::size_t>(i)] -= xl[static_cast<std::size_t>(c)] * t[at3(c, i, b, m)].value() * yl[static_cast<std::size_t>(b)];
  return out;
}

Field second_fundamental_field(const ConnectionContext& ctx, std::span<const Jet> x, std::span<const Jet> y) {
  const int m = ctx.m();
  const Field xl = ctx.lower(x), yl = ctx.lower(y);
  const auto& t = ctx.pi_derivative();
  Field out;
  for (int i = 0; i < m; ++i) {
    Jet s = zero_jet(ctx.frame(), t[0].order());
    for (int c = 0; c < m; ++c) {
      Jet inner_sum = zero_jet(ctx.frame(), t[0].order());
      for (int b = 0; b < m; ++b) inner_sum.fma(t[at3(c, i, b, m)], yl[static_cast<std::size_t>(b)]);
      s.fma(xl[static_cast<std::size_t>(c)], inner_sum);
    }
    out.push_back(-s);
  }
  return out;
}

double nablah_d_symmetry(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y) {
  ctx.require(x, Character::Tangent, "X");
  ctx.require(y, Character::Tangent, "Y");
  const int m = ctx.m();
  const auto& l = ctx.pi_derivative_lowered();
  double worst = 0;
  for (int k = 0; k < m; ++k) {
    double s = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        s -= x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] * (l[at3(i, j, k, m)] - l[at3(j, i, k, m)]);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

std::vector<Jet> weingarten_b(const ConnectionContext& ctx, std::span<const Jet> normal) {
  ctx.require(values(normal), Character::Normal, "N");
  auto b = ctx.nabla_vector(normal);
  for (auto& e : b) e = -e;
  return b;
}

Vector apply_b(const ConnectionContext& ctx, std::span<const Jet> b, std::span<const double> x) {
  const int m = ctx.m();
  check_size(b.size(), m * m, "B");
  const Vector xl = ctx.lower(x);
  Vector out(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(i)] += b[at2(i, j, m)].value() * xl[static_cast<std::size_t>(j)];
  return out;
}

double riemann(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const double> z,
               std::span<const double> v) {
  ctx.require(x, Character::Tangent, "X");
  ctx.require(y, Character::Tangent, "Y");
  ctx.require(z, Character::Tangent, "Z");
  ctx.require(v, Character::Tangent, "V");
  const int m = ctx.m();
  const auto& r = ctx.riemann_tensor();
  double s = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          s += r[at4(i, j, k, l, m)] * x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(k)] *
               v[static_cast<std::size_t>(l)];
  return s;
}

std::vector<double> ricci_tensor(const ConnectionContext& ctx) {
  const int m = ctx.m();
  const auto& r = ctx.riemann_tensor();
  const auto d = ctx.frame().d_values();
  std::vector<double> ric(static_cast<std::size_t>(m * m), 0.0);
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) {
      double s = 0;
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) s += d[at2(i, k, m)] * r[at4(i, j, k, l, m)];
      ric[at2(j, l, m)] = s;
    }
  return ric;
}

double ricci(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y) {
  ctx.require(x, Character::Tangent, "X");
  ctx.require(y, Character::Tangent, "Y");
  const int m = ctx.m();
  const auto ric = ricci_tensor(ctx);
  double s = 0;
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) s += ric[at2(j, l, m)] * x[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(l)];
  return s;
}

double scalar_curvature(const ConnectionContext& ctx) {
  const int m = ctx.m();
  const auto ric = ricci_tensor(ctx);
  const auto d = ctx.frame().d_values();
  double s = 0;
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) s += d[at2(j, l, m)] * ric[at2(j, l, m)];
  return s;
}

double codazzi_lhs(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const double> z,
                   std::span<const double> normal) {
  const int m = ctx.m();
  if (ctx.flat()) return 0.0;
  double s = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          s += ctx.ambient_riemann(i, j, k, l) * normal[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(j)] *
               x[static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(l)];
  return s;
}

CodazziTerms::CodazziTerms(const ConnectionContext& ctx, std::span<const Jet> normal) : ctx_(&ctx), normal_(values(normal)) {
  ctx.require(normal_, Character::Normal, "N");
  const auto h = ctx.nabla_tensor(weingarten_b(ctx, normal));
  h_.reserve(h.size());
  for (const auto& v : h) h_.push_back(v.value());
}

double CodazziTerms::b_form(std::span<const double> x, std::span<const double> y, std::span<const double> z) const {
  const ConnectionContext& ctx = *ctx_;
  ctx.require(x, Character::Tangent, "X");
  ctx.require(y, Character::Tangent, "Y");
  ctx.require(z, Character::Tangent, "Z");
  const int m = ctx.m();
  const Vector zl = ctx.lower(z);
  // (hat-nabla_W B)(Z) paired with V.
  auto term = [&](std::span<const double> w, std::span<const double> v) {
    const Vector wl = ctx.lower(w), vl = ctx.lower(v);
    double s = 0;
    for (int c = 0; c < m; ++c)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          s += wl[static_cast<std::size_t>(c)] * h_[at3(c, i, j, m)] * zl[static_cast<std::size_t>(j)] * vl[static_cast<std::size_t>(i)];
    return s;
  };
  return term(x, y) - term(y, x);
}

double CodazziTerms::residual(std::span<const double> x, std::span<const double> y, std::span<const double> z) const {
  return codazzi_lhs(*ctx_, x, y, z, normal_) - b_form(x, y, z);
}

double codazzi_b_form(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const double> z,
                      std::span<const Jet> normal) {
  return CodazziTerms(ctx, normal).b_form(x, y, z);
}

double codazzi_alpha_form(const ConnectionContext& ctx, std::span<const Jet> x, std::span<const Jet> y, std::span<const Jet> z,
                          std::span<const Jet> normal) {
  const int m = ctx.m();
  const Vector xv = values(x), yv = values(y), zv = values(z), nv = values(normal);
  ctx.require(xv, Character::Tangent, "X");
  ctx.require(yv, Character::Tangent, "Y");
  ctx.require(zv, Character::Tangent, "Z");
  ctx.require(nv, Character::Normal, "N");
  const auto& frame = ctx.frame();

  // eta((nabla~_A alpha)(B, Z), N) for A, B among the fields X, Y.
  auto term = [&](std::span<const Jet> a, std::span<const Jet> b) {
    const Vector av = values(a);
    const Vector al = ctx.lower(av);
    const Field alpha_bz = second_fundamental_field(ctx, b, z);
    const Jet h = ctx.inner(alpha_bz, normal);
    double s = 0;
    for (int c = 0; c < m; ++c) s += al[static_cast<std::size_t>(c)] * frame.d_of(c, h).value();
    s -= frame.inner(values(alpha_bz), hat_nabla_along(ctx, av, normal));
    s -= frame.inner(second_fundamental(ctx, levi_civita(ctx, av, b), zv), nv);
    s -= frame.inner(second_fundamental(ctx, values(b), levi_civita(ctx, av, z)), nv);
    return s;
  };
  return term(x, y) - term(y, x);
}

double codazzi_residual(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const double> z,
                        std::span<const Jet> normal) {
  return CodazziTerms(ctx, normal).residual(x, y, z);
}

double divergence(const ConnectionContext& ctx, std::span<const Jet> x) {
  ctx.require(values(x), Character::Tangent, "X");
  const int m = ctx.m();
  const auto h = ctx.nabla_vector(x);
  const auto& ev = ctx.frame().eta_values();
  double s = 0;
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < m; ++c) s += ev[at2(i, c, m)] * h[at2(c, i, m)].value();
  return s;
}

double laplace_hat(const ConnectionContext& ctx, const Jet& f) {
  if (f.order() < 2) throw ShapeError("laplace_hat needs a jet of order >= 2");
  return divergence(ctx, hat_grad(ctx, f));
}

bool nambu_laplace_applicable(const EmbeddedManifold& mfld) { return mfld.bracket.kind() == BracketStructure::Kind::NambuDensity; }

bool kahler_laplace_applicable(const EmbeddedManifold& mfld) {
  return mfld.bracket.arity() == 2 && mfld.bracket.antisymmetric() && mfld.n % 2 == 0;
}

namespace {

// (eps / gamma^outer) sum_w {gamma^inner a_t w_ts, x^{J_s}}, a = row(f).
double weighted_divergence_form(const ConnectionContext& ctx, const Jet& f, double outer, double inner) {
  const auto& frame = ctx.frame();
  if (f.order() < 2) throw ShapeError("Laplacian needs a jet of order >= 2");
  const auto a = frame.row(f);
  const Jet g_in = gamma_power(frame, inner);
  std::vector<Jet> acc(frame.tuples().size());
  for (const auto& w : frame.weights()) {
    Jet term = g_in * a[w.t] * w.w;
    if (acc[w.s].empty())
      acc[w.s] = std::move(term);
    else
      acc[w.s] += term;
  }
  double s = 0;
  for (std::size_t t = 0; t < acc.size(); ++t)
    if (!acc[t].empty()) s += frame.row_entry(acc[t], t).value();
  return frame.epsilon() * s / std::pow(frame.gamma2(), outer / 2.0);
}

}  // namespace

double laplace_nambu(const ConnectionContext& ctx, const Jet& f) {
  if (!nambu_laplace_applicable(ctx.frame().manifold())) throw ApplicabilityError("Nambu Laplacian needs a Nambu density structure");
  return weighted_divergence_form(ctx, f, 1.0, -1.0);
}

double laplace_kahler(const ConnectionContext& ctx, const Jet& f) {
  if (!kahler_laplace_applicable(ctx.frame().manifold()))
    throw ApplicabilityError("Kahler Laplacian needs an antisymmetric 2-bracket on an even-dimensional surface");
  const double n = ctx.n();
  return weighted_divergence_form(ctx, f, n / 2.0, (n - 4.0) / 2.0);
}

DCommutator d_commutator(const ConnectionContext& ctx, const Jet& f) {
  const auto& frame = ctx.frame();
  if (frame.big_n() != 1) throw ApplicabilityError("D commutator check needs a 2-bracket");
  if (f.order() < 2) throw ShapeError("D commutator check needs a jet of order >= 2");
  const int m = ctx.m();
  const auto p = p_tensor(frame);  // p[i*m+k] = {x^i, x^k}
  const auto& ev = frame.eta_values();
  const auto d = frame.d_values();

  std::vector<double> pl(static_cast<std::size_t>(m * m), 0.0);  // eta_{ii'} P^{i'k}
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      for (int q = 0; q < m; ++q) pl[at2(i, k, m)] += ev[at2(i, q, m)] * p[at2(q, k, m)];

  double hyp = 0;
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      double s = -p[at2(i, k, m)];
      for (int j = 0; j < m; ++j) {
        double dij = 0;
        for (int q = 0; q < m; ++q) dij += d[at2(i, q, m)] * ev[at2(q, j, m)];
        s += dij * p[at2(j, k, m)];
      }
      hyp = std::max(hyp, std::abs(s));
    }

  const auto grad = frame.d_of(f);
  std::vector<double> c(static_cast<std::size_t>(m * m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) c[at2(i, j, m)] = frame.d_of(i, grad[static_cast<std::size_t>(j)]).value() - frame.d_of(j, grad[static_cast<std::size_t>(i)]).value();

  double res = 0;
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      double s = 0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) s += c[at2(i, j, m)] * pl[at2(i, k, m)] * pl[at2(j, l, m)];
      res = std::max(res, std::abs(s));
    }
  return {res, hyp};
}

double curvature_commutator(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const Jet> u) {
  ctx.require(x, Character::Tangent, "X");
  ctx.require(y, Character::Tangent, "Y");
  const int m = ctx.m();
  if (u.empty() || u[0].order() < 2) throw ShapeError("curvature commutator needs a field of order >= 2");
  const auto h = ctx.nabla_tensor(ctx.nabla_vector(u));
  const Vector xl = ctx.lower(x), yl = ctx.lower(y);
  const auto& ei = ctx.frame().eta_inv_values();
  const Vector uv = values(u);
  double worst = 0;
  for (int k = 0; k < m; ++k) {
    double s = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        s += xl[static_cast<std::size_t>(i)] * yl[static_cast<std::size_t>(j)] * (h[at3(i, j, k, m)].value() - h[at3(j, i, k, m)].value());
    if (!ctx.flat()) {
      for (int p = 0; p < m; ++p)
        for (int l = 0; l < m; ++l)
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
              s -= ei[at2(k, p, m)] * ctx.ambient_riemann(p, l, i, j) * uv[static_cast<std::size_t>(l)] * x[static_cast<std::size_t>(i)] *
                   y[static_cast<std::size_t>(j)];
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

std::vector<Field> gram_schmidt_normals(const ConnectionContext& ctx) {
  const auto& frame = ctx.frame();
  const int m = ctx.m();
  std::vector<Field> cols;
  for (int k = 0; k < m; ++k) {
    Field v;
    for (int i = 0; i < m; ++i) {
      Jet s = zero_jet(frame, frame.pi(0, 0).order());
      for (int j = 0; j < m; ++j) s.fma(frame.pi(i, j), frame.eta(j, k));
      v.push_back(std::move(s));
    }
    cols.push_back(std::move(v));
  }
  std::vector<Field> normals;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (int step = 0; step < m - ctx.n(); ++step) {
    int best = -1;
    double best_norm = 0;
    for (int k = 0; k < m; ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const double q = std::abs(ctx.inner(cols[static_cast<std::size_t>(k)], cols[static_cast<std::size_t>(k)]).value());
      if (best < 0 || q > best_norm) {
        best = k;
        best_norm = q;
      }
    }
    if (best < 0 || best_norm < kPivotThreshold) throw DegenerateError("null pivot while building the normal frame");
    used[static_cast<std::size_t>(best)] = true;
    const Field& v = cols[static_cast<std::size_t>(best)];
    const Jet q = ctx.inner(v, v);
    const double sigma = q.value() > 0 ? 1.0 : -1.0;
    const Jet scale = reciprocal(sqrt(q * sigma));
    Field nrm;
    for (const auto& c : v) nrm.push_back(c * scale);
    for (int k = 0; k < m; ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      Field& w = cols[static_cast<std::size_t>(k)];
      const Jet proj = ctx.inner(w, nrm) * sigma;
      for (int i = 0; i < m; ++i) w[static_cast<std::size_t>(i)] -= proj * nrm[static_cast<std::size_t>(i)];
    }
    normals.push_back(std::move(nrm));
  }
  return normals;
}

}  // namespace bracketgeo
