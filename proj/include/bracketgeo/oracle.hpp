#pragma once

// Classical coordinate-tensor pipeline: induced metric, Christoffel symbols,
// curvature, Laplace-Beltrami, second fundamental form and the ambient
// Levi-Civita connection. Shares nothing with the bracket code beyond the
// manifold description and jets.

#include <span>
#include <vector>

#include "bracketgeo/jet.hpp"
#include "bracketgeo/manifold.hpp"

namespace bracketgeo {

struct MetricData {
  int n = 0;
  std::vector<Jet> g;     // g_ab, order K-1
  std::vector<Jet> ginv;  // g^ab
  Jet det;
  int positive = 0, negative = 0;

  double value(int a, int b) const { return g[static_cast<std::size_t>(a * n + b)].value(); }
  double inv_value(int a, int b) const { return ginv[static_cast<std::size_t>(a * n + b)].value(); }
};

class Oracle {
 public:
  Oracle(const EmbeddedManifold& mfld, std::span<const double> u, int order = 3);

  const EmbeddedManifold& manifold() const { return *mfld_; }
  int n() const { return mfld_->n; }
  int m() const { return mfld_->m; }
  const std::vector<Jet>& chart() const { return chart_; }
  const std::vector<Jet>& x() const { return x_; }

  const MetricData& metric() const { return metric_; }
  /// Tangent basis vector e_a = d_a x (ambient components).
  std::vector<double> basis(int a) const;

  double christoffel(int a, int b, int c) const;  // Gamma^a_bc
  /// R_abcd = g_ae R^e_bcd with R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + ...
  double riemann(int a, int b, int c, int d) const;
  double ricci(int b, int d) const;
  double scalar_curvature() const { return scalar_; }

  /// (1/sqrt|g|) d_a(sqrt|g| g^ab d_b f); f must carry order >= 2.
  double laplace(const Jet& f) const;
  /// g^ab d_a f d_b x^i.
  std::vector<double> gradient(const Jet& f) const;

  /// Ambient metric, Christoffels and curvature at x(u).
  double eta(int i, int j) const { return eta_[idx(i, j)]; }
  double eta_inv(int i, int j) const { return eta_inv_[idx(i, j)]; }
  double ambient_christoffel(int i, int j, int k) const;  // Gamma-bar^i_jk
  double ambient_riemann(int i, int j, int k, int l) const;  // lowered R-bar_ijkl
  bool flat_ambient() const { return mfld_->ambient.is_diagonal(); }

  /// alpha(e_a, e_b) = d_a d_b x + Gamma-bar(e_a, e_b) - Gamma^c_ab e_c.
  std::vector<double> second_fundamental(int a, int b) const;

  /// Chart components of the tangential part of an ambient vector.
  std::vector<double> chart_components(std::span<const double> v) const;
  std::vector<double> tangential(std::span<const double> v) const;
  std::vector<double> normal_part(std::span<const double> v) const;
  double inner(std::span<const double> a, std::span<const double> b) const;

  /// Ambient covariant derivative of a field along the surface in the
  /// direction of the tangent vector with chart components xc.
  std::vector<double> ambient_derivative(std::span<const double> xc, std::span<const Jet> field) const;
  /// Intrinsic covariant derivative of a tangent field through its chart
  /// components and the Christoffel symbols.
  std::vector<double> levi_civita(std::span<const double> xc, std::span<const Jet> field) const;
  /// Intrinsic divergence nabla_a X^a of a tangent field.
  double divergence(std::span<const Jet> field) const;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * mfld_->m + j); }
  std::vector<Jet> chart_component_jets(std::span<const Jet> field) const;

  const EmbeddedManifold* mfld_;
  int order_;
  std::vector<Jet> chart_, x_;
  std::vector<std::vector<Jet>> dx_;  // dx_[i][a] = d_a x^i
  MetricData metric_;
  std::vector<Jet> gamma_;            // Gamma^a_bc jets
  std::vector<double> riemann_;       // R_abcd
  std::vector<double> ricci_;
  double scalar_ = 0;
  std::vector<double> eta_, eta_inv_;
  std::vector<double> amb_gamma_;     // Gamma-bar^i_jk
  std::vector<double> amb_riemann_;   // R-bar_ijkl
};

}  // namespace bracketgeo
