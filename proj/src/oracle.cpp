#include "bracketgeo/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "bracketgeo/error.hpp"
#include "bracketgeo/jet_matrix.hpp"

namespace bracketgeo {

namespace {

std::size_t at(int a, int b, int n) { return static_cast<std::size_t>(a * n + b); }
std::size_t at(int a, int b, int c, int n) { return static_cast<std::size_t>((a * n + b) * n + c); }
std::size_t at(int a, int b, int c, int d, int n) { return static_cast<std::size_t>(((a * n + b) * n + c) * n + d); }

}  // namespace

Oracle::Oracle(const EmbeddedManifold& mfld, std::span<const double> u, int order) : mfld_(&mfld), order_(order) {
  if (order < 3) throw ShapeError("the coordinate pipeline needs jet order >= 3 for curvature");
  if (static_cast<int>(u.size()) != mfld.n) throw ShapeError("chart point has wrong dimension");
  const int n = mfld.n, m = mfld.m;
  chart_ = chart_jets(u, order);
  for (const auto& e : mfld.embedding) x_.push_back(e.eval_jet(chart_));
  dx_.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int a = 0; a < n; ++a) dx_[static_cast<std::size_t>(i)].push_back(x_[static_cast<std::size_t>(i)].derivative(a));

  // Induced metric g_ab = eta_ij(x(u)) d_a x^i d_b x^j.
  const std::vector<Jet> eta_surface = mfld.ambient.eval_jets(x_);
  metric_.n = n;
  metric_.g.resize(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      Jet s = Jet::constant(0.0, n, order - 1);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const Jet& e = eta_surface[at(i, j, m)];
          if (mfld.ambient.is_diagonal() && i != j) continue;
          s += e * dx_[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] * dx_[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
        }
      }
      metric_.g[at(a, b, n)] = s;
      metric_.g[at(b, a, n)] = s;
    }
  }
  try {
    metric_.ginv = jet_inverse(metric_.g, n);
  } catch (const DomainError&) {
    throw DegenerateError("induced metric is singular at the chart point");
  }
  metric_.det = jet_determinant(metric_.g, n);
  {
    Eigen::MatrixXd gv(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) gv(a, b) = metric_.value(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gv);
    for (int a = 0; a < n; ++a) (es.eigenvalues()(a) > 0 ? metric_.positive : metric_.negative)++;
  }

  // Christoffel symbols Gamma^a_bc as jets of order K-2.
  std::vector<Jet> dg(static_cast<std::size_t>(n * n * n));  // dg[c][a][b] = d_c g_ab
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) dg[at(c, a, b, n)] = metric_.g[at(a, b, n)].derivative(c);
  gamma_.resize(static_cast<std::size_t>(n * n * n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = b; c < n; ++c) {
        Jet s = Jet::constant(0.0, n, order - 2);
        for (int d = 0; d < n; ++d) {
          s += metric_.ginv[at(a, d, n)] * (dg[at(b, d, c, n)] + dg[at(c, d, b, n)] - dg[at(d, b, c, n)]);
        }
        s *= 0.5;
        gamma_[at(a, b, c, n)] = s;
        gamma_[at(a, c, b, n)] = s;
      }
    }
  }

  // R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb
  std::vector<double> rup(static_cast<std::size_t>(n * n * n * n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double r = gamma_[at(a, d, b, n)].partial1(c) - gamma_[at(a, c, b, n)].partial1(d);
          for (int e = 0; e < n; ++e) {
            r += gamma_[at(a, c, e, n)].value() * gamma_[at(e, d, b, n)].value() - gamma_[at(a, d, e, n)].value() * gamma_[at(e, c, b, n)].value();
          }
          rup[at(a, b, c, d, n)] = r;
        }
  riemann_.assign(rup.size(), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0;
          for (int e = 0; e < n; ++e) s += metric_.value(a, e) * rup[at(e, b, c, d, n)];
          riemann_[at(a, b, c, d, n)] = s;
        }
  ricci_.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d)
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) ricci_[at(b, d, n)] += metric_.inv_value(a, c) * riemann_[at(a, b, c, d, n)];
  scalar_ = 0;
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) scalar_ += metric_.inv_value(b, d) * ricci_[at(b, d, n)];

  // Ambient geometry at the point x(u), computed with jets in the ambient coordinates.
  const auto mm = static_cast<std::size_t>(m);
  eta_.assign(mm * mm, 0.0);
  eta_inv_.assign(mm * mm, 0.0);
  amb_gamma_.assign(mm * mm * mm, 0.0);
  amb_riemann_.assign(mm * mm * mm * mm, 0.0);
  if (mfld.ambient.is_diagonal()) {
    for (int i = 0; i < m; ++i) {
      eta_[at(i, i, m)] = mfld.ambient.signs()[static_cast<std::size_t>(i)];
      eta_inv_[at(i, i, m)] = eta_[at(i, i, m)];
    }
    return;
  }
  std::vector<Jet> y;
  for (int k = 0; k < m; ++k) y.push_back(Jet::variable(k, x_[static_cast<std::size_t>(k)].value(), m, 2));
  const std::vector<Jet> eta_amb = mfld.ambient.eval_jets(y);
  std::vector<Jet> eta_amb_inv;
  try {
    eta_amb_inv = jet_inverse(eta_amb, m);
  } catch (const DomainError&) {
    throw DegenerateError("ambient metric is singular at x(u)");
  }
  eta_ = jet_values(eta_amb);
  eta_inv_ = jet_values(eta_amb_inv);
  std::vector<Jet> gbar(mm * mm * mm);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        Jet s = Jet::constant(0.0, m, 1);
        for (int l = 0; l < m; ++l) {
          s += eta_amb_inv[at(i, l, m)] *
               (eta_amb[at(l, k, m)].derivative(j) + eta_amb[at(l, j, m)].derivative(k) - eta_amb[at(j, k, m)].derivative(l));
        }
        gbar[at(i, j, k, m)] = 0.5 * s;
        amb_gamma_[at(i, j, k, m)] = gbar[at(i, j, k, m)].value();
      }
  std::vector<double> rbar_up(mm * mm * mm * mm, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double r = gbar[at(i, l, j, m)].partial1(k) - gbar[at(i, k, j, m)].partial1(l);
          for (int p = 0; p < m; ++p) r += amb_gamma_[at(i, k, p, m)] * amb_gamma_[at(p, l, j, m)] - amb_gamma_[at(i, l, p, m)] * amb_gamma_[at(p, k, j, m)];
          rbar_up[at(i, j, k, l, m)] = r;
        }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double s = 0;
          for (int p = 0; p < m; ++p) s += eta_[at(i, p, m)] * rbar_up[at(p, j, k, l, m)];
          amb_riemann_[at(i, j, k, l, m)] = s;
        }
}

std::vector<double> Oracle::basis(int a) const {
  std::vector<double> e;
  for (const auto& row : dx_) e.push_back(row[static_cast<std::size_t>(a)].value());
  return e;
}

double Oracle::christoffel(int a, int b, int c) const { return gamma_[at(a, b, c, n())].value(); }
double Oracle::riemann(int a, int b, int c, int d) const { return riemann_[at(a, b, c, d, n())]; }
double Oracle::ricci(int b, int d) const { return ricci_[at(b, d, n())]; }
double Oracle::ambient_christoffel(int i, int j, int k) const { return amb_gamma_[at(i, j, k, m())]; }
double Oracle::ambient_riemann(int i, int j, int k, int l) const { return amb_riemann_[at(i, j, k, l, m())]; }

double Oracle::laplace(const Jet& f) const {
  const int n = this->n();
  Jet det = metric_.det;
  if (det.value() < 0) det = -det;
  const Jet vol = sqrt(det);
  std::vector<Jet> df;
  for (int b = 0; b < n; ++b) df.push_back(f.derivative(b));
  double div = 0;
  for (int a = 0; a < n; ++a) {
    Jet h = Jet::constant_like(0.0, df[0]);
    for (int b = 0; b < n; ++b) h += metric_.ginv[at(a, b, n)] * df[static_cast<std::size_t>(b)];
    div += (vol * h).partial1(a);
  }
  return div / vol.value();
}

std::vector<double> Oracle::gradient(const Jet& f) const {
  const int n = this->n(), m = this->m();
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double w = metric_.inv_value(a, b) * f.partial1(a);
      for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] += w * dx_[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)].value();
    }
  }
  return out;
}

std::vector<double> Oracle::second_fundamental(int a, int b) const {
  const int n = this->n(), m = this->m();
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  deg[static_cast<std::size_t>(a)] += 1;
  deg[static_cast<std::size_t>(b)] += 1;
  const auto ea = basis(a), eb = basis(b);
  for (int i = 0; i < m; ++i) {
    double v = x_[static_cast<std::size_t>(i)].partial(deg);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) v += ambient_christoffel(i, j, k) * ea[static_cast<std::size_t>(j)] * eb[static_cast<std::size_t>(k)];
    for (int c = 0; c < n; ++c) v -= christoffel(c, a, b) * dx_[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].value();
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

double Oracle::inner(std::span<const double> a, std::span<const double> b) const {
  double s = 0;
  for (int i = 0; i < m(); ++i)
    for (int j = 0; j < m(); ++j) s += a[static_cast<std::size_t>(i)] * eta(i, j) * b[static_cast<std::size_t>(j)];
  return s;
}

std::vector<double> Oracle::chart_components(std::span<const double> v) const {
  const int n = this->n();
  std::vector<double> proj(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) proj[static_cast<std::size_t>(b)] = inner(v, basis(b));
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) c[static_cast<std::size_t>(a)] += metric_.inv_value(a, b) * proj[static_cast<std::size_t>(b)];
  return c;
}

std::vector<double> Oracle::tangential(std::span<const double> v) const {
  const auto c = chart_components(v);
  std::vector<double> out(static_cast<std::size_t>(m()), 0.0);
  for (int a = 0; a < n(); ++a) {
    const auto e = basis(a);
    for (int i = 0; i < m(); ++i) out[static_cast<std::size_t>(i)] += c[static_cast<std::size_t>(a)] * e[static_cast<std::size_t>(i)];
  }
  return out;
}

std::vector<double> Oracle::normal_part(std::span<const double> v) const {
  auto t = tangential(v);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = v[i] - t[i];
  return t;
}

std::vector<double> Oracle::ambient_derivative(std::span<const double> xc, std::span<const Jet> field) const {
  const int n = this->n(), m = this->m();
  std::vector<double> xv(static_cast<std::size_t>(m), 0.0);
  for (int a = 0; a < n; ++a) {
    const auto e = basis(a);
    for (int i = 0; i < m; ++i) xv[static_cast<std::size_t>(i)] += xc[static_cast<std::size_t>(a)] * e[static_cast<std::size_t>(i)];
  }
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double v = 0;
    for (int a = 0; a < n; ++a) v += xc[static_cast<std::size_t>(a)] * field[static_cast<std::size_t>(i)].partial1(a);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) v += ambient_christoffel(i, j, k) * xv[static_cast<std::size_t>(j)] * field[static_cast<std::size_t>(k)].value();
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

std::vector<Jet> Oracle::chart_component_jets(std::span<const Jet> field) const {
  const int n = this->n(), m = this->m();
  const std::vector<Jet> eta_surface = mfld_->ambient.eval_jets(x_);
  std::vector<Jet> proj;
  for (int b = 0; b < n; ++b) {
    Jet s = Jet::constant(0.0, n, order_ - 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (mfld_->ambient.is_diagonal() && i != j) continue;
        s += field[static_cast<std::size_t>(i)] * eta_surface[at(i, j, m)] * dx_[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
      }
    proj.push_back(s);
  }
  std::vector<Jet> c;
  for (int a = 0; a < n; ++a) {
    Jet s = Jet::constant_like(0.0, proj[0]);
    for (int b = 0; b < n; ++b) s += metric_.ginv[at(a, b, n)] * proj[static_cast<std::size_t>(b)];
    c.push_back(s);
  }
  return c;
}

std::vector<double> Oracle::levi_civita(std::span<const double> xc, std::span<const Jet> field) const {
  const int n = this->n(), m = this->m();
  const auto c = chart_component_jets(field);
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  for (int a = 0; a < n; ++a) {
    double comp = 0;
    for (int b = 0; b < n; ++b) {
      comp += xc[static_cast<std::size_t>(b)] * c[static_cast<std::size_t>(a)].partial1(b);
      for (int d = 0; d < n; ++d) comp += christoffel(a, b, d) * xc[static_cast<std::size_t>(b)] * c[static_cast<std::size_t>(d)].value();
    }
    const auto e = basis(a);
    for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] += comp * e[static_cast<std::size_t>(i)];
  }
  return out;
}

double Oracle::divergence(std::span<const Jet> field) const {
  const int n = this->n();
  const auto c = chart_component_jets(field);
  double div = 0;
  for (int a = 0; a < n; ++a) {
    div += c[static_cast<std::size_t>(a)].partial1(a);
    for (int b = 0; b < n; ++b) div += christoffel(a, a, b) * c[static_cast<std::size_t>(b)].value();
  }
  return div;
}

}  // namespace bracketgeo
