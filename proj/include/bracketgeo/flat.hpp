#pragma once

// Closed-form expressions for a (pseudo-)Euclidean ambient space, written
// directly in brackets of the embedding coordinates with gamma^2 eliminated.
// With signs s_i of the diagonal metric and s_I the product over a tuple,
//   <<A, B>> = sum_I s_I {A, x^I} {B, x^I},   B2 = sum_j s_j <<x^j, x^j>>,
//   D^{ik} = n <<x^i, x^k>> / B2,             D^i(f) = n <<x^i, f>> / B2.
// Rows are recomputed from the multivector over every tuple; nothing is
// shared with PointFrame beyond the chart data and the multivector values.

#include <span>
#include <vector>

#include "bracketgeo/bracket.hpp"

namespace bracketgeo {

class FlatPath {
 public:
  /// Throws ApplicabilityError unless the ambient metric is diagonal.
  explicit FlatPath(const PointFrame& frame);

  Jet pairing(const Jet& a, const Jet& b) const;
  const Jet& norm_sq() const { return b2_; }

  Jet d(int i, int k) const;
  Jet grad(int i, const Jet& f) const;
  std::vector<Jet> grad(const Jet& f) const;

  double divergence(std::span<const Jet> x) const;
  /// W_N(X)^i = -D^i(N^j) X_j.
  std::vector<double> weingarten(std::span<const Jet> normal, std::span<const double> x) const;
  double laplace(const Jet& f) const;
  std::vector<double> levi_civita(std::span<const double> x, std::span<const Jet> y) const;
  double scalar_curvature() const;
  /// X_i Y_j Z_k (D^i D^j - D^j D^i)(N^k).
  double codazzi(std::span<const double> x, std::span<const double> y, std::span<const double> z, std::span<const Jet> normal) const;

 private:
  std::vector<Jet> row(const Jet& f) const;
  Jet pair_rows(std::span<const Jet> a, std::span<const Jet> b) const;

  const PointFrame* frame_;
  int n_, m_;
  std::vector<int> signs_;
  std::vector<MultiIndex> tuples_;
  std::vector<double> tuple_signs_;
  std::vector<std::vector<Jet>> xrows_;
  Jet b2_;
};

}  // namespace bracketgeo
