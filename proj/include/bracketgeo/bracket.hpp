#pragma once

// Bracket-side frame at a chart point: rows {f, x^I} over multi-indices,
// their eta-contraction, the tensor P, the scale gamma^2 with sign epsilon,
// and the tangent projection D with its complement Pi.

#include <cmath>
#include <span>
#include <vector>

#include "bracketgeo/jet.hpp"
#include "bracketgeo/manifold.hpp"

namespace bracketgeo {

inline constexpr double kDegenerateScale = 1e-12;

struct FrameOptions {
  int order = 3;
  /// Iterate sorted multi-indices only and weight pairs by det eta[I,J].
  /// Requires a completely antisymmetric structure.
  bool fast_path = false;
};

/// A multi-index I = (i1..iN) of ambient axes.
using MultiIndex = std::vector<int>;

/// Every tuple in [0,m)^N, or only strictly increasing ones.
std::vector<MultiIndex> multi_indices(int m, int big_n, bool sorted_only);

class PointFrame {
 public:
  PointFrame(const EmbeddedManifold& mfld, std::span<const double> u, FrameOptions options = {});

  const EmbeddedManifold& manifold() const { return *mfld_; }
  int n() const { return mfld_->n; }
  int m() const { return mfld_->m; }
  int big_n() const { return mfld_->bracket.order_n(); }
  int order() const { return options_.order; }
  bool fast_path() const { return options_.fast_path; }
  const ChartPoint& point() const { return u_; }

  const std::vector<Jet>& chart() const { return chart_; }
  const std::vector<Jet>& x() const { return x_; }
  /// theta for each structure entry, in the order of BracketStructure::entries().
  const std::vector<Jet>& theta() const { return theta_; }

  const std::vector<MultiIndex>& tuples() const { return tuples_; }
  /// {f, x^I} for every tuple in tuples().
  std::vector<Jet> row(const Jet& f) const;
  const std::vector<Jet>& x_row(int i) const { return xrows_[static_cast<std::size_t>(i)]; }
  /// (1/N!) sum_{I,J} a_I b_J eta_IJ, evaluated on the frame's tuple set.
  Jet contract(std::span<const Jet> a, std::span<const Jet> b) const;
  Jet pair(const Jet& f, const Jet& g) const { return contract(row(f), row(g)); }
  /// {f, x^I} for the single tuple tuples()[t].
  Jet row_entry(const Jet& f, std::size_t t) const;

  /// Non-zero terms of the contraction: weight w on the pair (tuples()[t], tuples()[s]).
  /// Summing w a_t b_s over all terms reproduces contract(a, b).
  struct Weight {
    std::size_t t, s;
    Jet w;
  };
  const std::vector<Weight>& weights() const { return weights_; }

  /// eta_ij and eta^ij at x(u) as chart jets of the frame's order.
  const Jet& eta(int i, int j) const { return eta_[idx(i, j)]; }
  const Jet& eta_inv(int i, int j) const { return eta_inv_[idx(i, j)]; }
  const std::vector<double>& eta_values() const { return eta_val_; }
  const std::vector<double>& eta_inv_values() const { return eta_inv_val_; }

  /// P^{iI} P^{jJ} eta_IJ.
  const Jet& pp(int i, int j) const { return pp_[idx(i, j)]; }
  /// s = (1/n) PP^{ij} eta_ij = epsilon gamma^2.
  const Jet& trace_scale() const { return s_; }
  /// 1/s = epsilon / gamma^2.
  const Jet& inverse_scale() const { return inv_s_; }
  double gamma2() const { return std::abs(s_.value()); }
  int epsilon() const { return s_.value() > 0 ? 1 : -1; }

  /// Projection D^{ij} and complement Pi^{ij} = eta^{ij} - D^{ij} (both indices up).
  const Jet& d(int i, int j) const { return d_[idx(i, j)]; }
  const Jet& pi(int i, int j) const { return pi_[idx(i, j)]; }
  std::vector<double> d_values() const;
  std::vector<double> pi_values() const;

  /// D^i(f) = (epsilon / gamma^2) <x^i, f>.
  Jet d_of(int i, const Jet& f) const;
  std::vector<Jet> d_of(const Jet& f) const;

  /// D(X)^i = D^{ij} eta_jk X^k and the same for Pi, on plain vectors.
  std::vector<double> project_tangent(std::span<const double> v) const;
  std::vector<double> project_normal(std::span<const double> v) const;
  std::vector<double> lower(std::span<const double> v) const;
  double inner(std::span<const double> a, std::span<const double> b) const;

  /// Local scale max(1, |P|_inf^2) used to normalise identity residuals.
  double local_scale() const;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(m()) + static_cast<std::size_t>(j); }
  void build_weights();

  const EmbeddedManifold* mfld_;
  FrameOptions options_;
  ChartPoint u_;
  std::vector<Jet> chart_, x_, theta_;
  std::vector<MultiIndex> tuples_;
  // q_[t * n + a] = {u^a, x^{I_t}}
  std::vector<Jet> q_;
  std::vector<Weight> weights_;
  std::vector<std::vector<Jet>> xrows_;
  std::vector<Jet> eta_, eta_inv_;
  std::vector<double> eta_val_, eta_inv_val_;
  std::vector<Jet> pp_, d_, pi_;
  Jet s_, inv_s_;
};

/// {f0, f1, ..., fN} straight from the multivector, no row caching.
Jet bracket_apply(const PointFrame& frame, std::span<const Jet> f);

/// P^{iI} over all m^N tuples (naive enumeration), row-major in i.
std::vector<double> p_tensor(const PointFrame& frame);

struct GammaEps {
  double gamma2;
  int epsilon;
};
GammaEps gamma_eps(const PointFrame& frame);

struct ProjectionResiduals {
  double idempotency;   // |D^2 - D|
  double eta_symmetry;  // |eta(X, D Y) - eta(D X, Y)| as a matrix
  double tangent_fix;   // |D e_a - e_a|
  double normal_kill;   // |Pi e_a|
  double complement;    // |D + Pi - Id|
  double trace;         // |D^i_i - n|
};
ProjectionResiduals projection_residuals(const PointFrame& frame);

}  // namespace bracketgeo
