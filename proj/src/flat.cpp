#include "bracketgeo/flat.hpp"

#include "bracketgeo/error.hpp"

namespace bracketgeo {

FlatPath::FlatPath(const PointFrame& frame) : frame_(&frame), n_(frame.n()), m_(frame.m()) {
  const auto& ambient = frame.manifold().ambient;
  if (!ambient.is_diagonal()) throw ApplicabilityError("explicit formulas need a diagonal ambient metric");
  signs_ = ambient.signs();
  tuples_ = multi_indices(m_, frame.big_n(), false);
  for (const auto& t : tuples_) {
    double s = 1;
    for (int i : t) s *= signs_[static_cast<std::size_t>(i)];
    tuple_signs_.push_back(s);
  }
  for (int i = 0; i < m_; ++i) xrows_.push_back(row(frame.x()[static_cast<std::size_t>(i)]));
  b2_ = Jet::constant_like(0.0, xrows_[0][0]);
  for (int j = 0; j < m_; ++j) b2_ += signs_[static_cast<std::size_t>(j)] * pair_rows(xrows_[static_cast<std::size_t>(j)], xrows_[static_cast<std::size_t>(j)]);
}

std::vector<Jet> FlatPath::row(const Jet& f) const {
  std::vector<Jet> args(static_cast<std::size_t>(frame_->big_n() + 1));
  args[0] = f;
  std::vector<Jet> out;
  out.reserve(tuples_.size());
  for (const auto& t : tuples_) {
    for (std::size_t k = 0; k < t.size(); ++k) args[k + 1] = frame_->x()[static_cast<std::size_t>(t[k])];
    out.push_back(bracket_apply(*frame_, args));
  }
  return out;
}

Jet FlatPath::pair_rows(std::span<const Jet> a, std::span<const Jet> b) const {
  Jet s = Jet::constant(0.0, n_, std::min(a[0].order(), b[0].order()));
  for (std::size_t t = 0; t < tuples_.size(); ++t) s.fma(a[t] * tuple_signs_[t], b[t]);
  return s;
}

Jet FlatPath::pairing(const Jet& a, const Jet& b) const { return pair_rows(row(a), row(b)); }

Jet FlatPath::d(int i, int k) const {
  return static_cast<double>(n_) * pair_rows(xrows_[static_cast<std::size_t>(i)], xrows_[static_cast<std::size_t>(k)]) / b2_;
}

Jet FlatPath::grad(int i, const Jet& f) const { return static_cast<double>(n_) * pair_rows(xrows_[static_cast<std::size_t>(i)], row(f)) / b2_; }

std::vector<Jet> FlatPath::grad(const Jet& f) const {
  const auto rf = row(f);
  std::vector<Jet> out;
  for (int i = 0; i < m_; ++i) out.push_back(static_cast<double>(n_) * pair_rows(xrows_[static_cast<std::size_t>(i)], rf) / b2_);
  return out;
}

double FlatPath::divergence(std::span<const Jet> x) const {
  double s = 0;
  for (int i = 0; i < m_; ++i) s += signs_[static_cast<std::size_t>(i)] * pair_rows(row(x[static_cast<std::size_t>(i)]), xrows_[static_cast<std::size_t>(i)]).value();
  return n_ * s / b2_.value();
}

std::vector<double> FlatPath::weingarten(std::span<const Jet> normal, std::span<const double> x) const {
  std::vector<double> out(static_cast<std::size_t>(m_), 0.0);
  for (int j = 0; j < m_; ++j) {
    const auto rn = row(normal[static_cast<std::size_t>(j)]);
    const double xj = signs_[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    for (int i = 0; i < m_; ++i) out[static_cast<std::size_t>(i)] -= n_ * pair_rows(rn, xrows_[static_cast<std::size_t>(i)]).value() / b2_.value() * xj;
  }
  return out;
}

double FlatPath::laplace(const Jet& f) const {
  const auto rf = row(f);
  double s = 0;
  for (int i = 0; i < m_; ++i) {
    const Jet inner = pair_rows(rf, xrows_[static_cast<std::size_t>(i)]) / b2_;
    s += signs_[static_cast<std::size_t>(i)] * pair_rows(row(inner), xrows_[static_cast<std::size_t>(i)]).value();
  }
  return static_cast<double>(n_) * n_ * s / b2_.value();
}

std::vector<double> FlatPath::levi_civita(std::span<const double> x, std::span<const Jet> y) const {
  const double b2 = b2_.value();
  // t^j = X_k D^k(Y^j), then project with D^i_j.
  std::vector<double> t(static_cast<std::size_t>(m_), 0.0);
  for (int j = 0; j < m_; ++j) {
    const auto ry = row(y[static_cast<std::size_t>(j)]);
    for (int k = 0; k < m_; ++k)
      t[static_cast<std::size_t>(j)] += signs_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)] * pair_rows(xrows_[static_cast<std::size_t>(k)], ry).value();
  }
  std::vector<double> out(static_cast<std::size_t>(m_), 0.0);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j)
      out[static_cast<std::size_t>(i)] += static_cast<double>(n_) * n_ * pair_rows(xrows_[static_cast<std::size_t>(j)], xrows_[static_cast<std::size_t>(i)]).value() *
                                          signs_[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(j)] / (b2 * b2);
  return out;
}

double FlatPath::scalar_curvature() const {
  const auto mm = static_cast<std::size_t>(m_);
  // e[(k*m+a)*m+b] = <<x^k, D^{ab}>> B2 / n, i.e. D^k(D^{ab}) up to the factor n / B2.
  std::vector<std::vector<Jet>> drows(mm * mm);
  for (int a = 0; a < m_; ++a)
    for (int b = a; b < m_; ++b) {
      drows[static_cast<std::size_t>(a) * mm + static_cast<std::size_t>(b)] =
          row(pair_rows(xrows_[static_cast<std::size_t>(a)], xrows_[static_cast<std::size_t>(b)]) / b2_);
      drows[static_cast<std::size_t>(b) * mm + static_cast<std::size_t>(a)] = drows[static_cast<std::size_t>(a) * mm + static_cast<std::size_t>(b)];
    }
  std::vector<double> e(mm * mm * mm);
  for (std::size_t k = 0; k < mm; ++k)
    for (std::size_t ab = 0; ab < mm * mm; ++ab) e[k * mm * mm + ab] = pair_rows(xrows_[k], drows[ab]).value();
  auto at = [&](int k, int a, int b) { return e[(static_cast<std::size_t>(k) * mm + static_cast<std::size_t>(a)) * mm + static_cast<std::size_t>(b)]; };
  double s = 0;
  for (int k = 0; k < m_; ++k)
    for (int i = 0; i < m_; ++i)
      for (int l = 0; l < m_; ++l) {
        const double sg = signs_[static_cast<std::size_t>(k)] * signs_[static_cast<std::size_t>(i)] * signs_[static_cast<std::size_t>(l)];
        s += sg * (at(k, k, l) * at(i, i, l) - at(k, i, l) * at(i, k, l));
      }
  const double b2 = b2_.value();
  const double n4 = static_cast<double>(n_) * n_ * n_ * n_;
  return n4 * s / (b2 * b2);
}

double FlatPath::codazzi(std::span<const double> x, std::span<const double> y, std::span<const double> z, std::span<const Jet> normal) const {
  double s = 0;
  for (int k = 0; k < m_; ++k) {
    const double zk = signs_[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
    if (zk == 0) continue;
    const auto rn = row(normal[static_cast<std::size_t>(k)]);
    std::vector<std::vector<Jet>> inner_rows;
    for (int j = 0; j < m_; ++j) inner_rows.push_back(row(pair_rows(rn, xrows_[static_cast<std::size_t>(j)]) / b2_));
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        const double xi = signs_[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        const double yj = signs_[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
        const double dij = pair_rows(inner_rows[static_cast<std::size_t>(j)], xrows_[static_cast<std::size_t>(i)]).value();
        const double dji = pair_rows(inner_rows[static_cast<std::size_t>(i)], xrows_[static_cast<std::size_t>(j)]).value();
        s += xi * yj * zk * (dij - dji);
      }
  }
  return static_cast<double>(n_) * n_ * s / b2_.value();
}

}  // namespace bracketgeo
