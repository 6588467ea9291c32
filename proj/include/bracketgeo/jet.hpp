#pragma once

// Truncated multivariate Taylor arithmetic.
//
// A Jet of dimension n and order K stores the Taylor coefficients of a
// scalar function at a point for every multi-degree of total degree <= K.
// Coefficients are kept in Taylor normalisation (partial / d!); use
// partial() to read actual derivatives.
//
// Multi-degrees are ranked by total degree first and lexicographically
// within a degree, so truncating to a lower order is a prefix of the
// coefficient array. Binary operations between jets of different order
// yield a jet of the lower order.

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace bracketgeo {

using MultiDegree = std::vector<int>;

class JetLayout {
 public:
  static std::shared_ptr<const JetLayout> get(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return degrees_.size(); }
  /// Number of coefficients with total degree <= k.
  std::size_t size_upto(int k) const { return prefix_[static_cast<std::size_t>(k)]; }

  const MultiDegree& degree(std::size_t idx) const { return degrees_[idx]; }
  int total_degree(std::size_t idx) const { return totals_[idx]; }
  /// Index of a multi-degree, or -1 when it exceeds the order.
  long index_of(std::span<const int> deg) const;

  struct MulTerm {
    std::uint32_t a, b, out;
  };
  /// All (a, b, out) with degree(a) + degree(b) == degree(out), ordered by out.
  const std::vector<MulTerm>& mul_table() const { return mul_; }

  struct DerivTerm {
    std::uint32_t src;
    double factor;
  };
  /// For axis `a`, entry k of the order-1 result reads coeff(src)*factor.
  const std::vector<DerivTerm>& deriv_table(int axis) const { return deriv_[static_cast<std::size_t>(axis)]; }

  /// Product of factorials of the multi-degree.
  double factorial_weight(std::size_t idx) const { return fact_[idx]; }

  JetLayout(int dim, int order);

 private:
  int dim_;
  int order_;
  std::vector<MultiDegree> degrees_;
  std::vector<int> totals_;
  std::vector<std::size_t> prefix_;
  std::vector<MulTerm> mul_;
  std::vector<std::vector<DerivTerm>> deriv_;
  std::vector<double> fact_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

class Jet {
 public:
  Jet() = default;

  /// Constant function; order 0 is allowed.
  static Jet constant(double value, int dim, int order);
  /// The coordinate function u^index at u^index = value.
  static Jet variable(int index, double value, int dim, int order);
  /// Constant with the same dimension and order as `like`.
  static Jet constant_like(double value, const Jet& like);

  bool empty() const { return !layout_; }
  int dim() const { return layout_->dim(); }
  int order() const { return layout_->order(); }
  const JetLayout& layout() const { return *layout_; }

  double value() const { return coeffs_[0]; }
  double coeff(std::span<const int> deg) const;
  double coeff_at(std::size_t idx) const { return coeffs_[idx]; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  /// The partial derivative d^deg f at the expansion point.
  double partial(std::span<const int> deg) const;
  /// First partial along one axis.
  double partial1(int axis) const;

  /// Jet of the partial derivative along `axis`; order drops by one.
  Jet derivative(int axis) const;
  Jet truncated(int order) const;
  /// Restriction to the hyperplane where all axes >= leading are zero.
  Jet restricted(int leading) const;
  /// Embeds a jet of dimension d into dimension `dim` >= d (extra axes unused).
  Jet widened(int dim) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);

  /// a += b * c without a temporary; result order is the minimum of the three.
  void fma(const Jet& b, const Jet& c);

 private:
  Jet(std::shared_ptr<const JetLayout> layout, std::vector<double> coeffs)
      : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {}

  void lower_to(int order);
  friend Jet compose(const Jet& a, std::span<const double> taylor);

  std::shared_ptr<const JetLayout> layout_;
  std::vector<double> coeffs_;
};

/// Composes a univariate Taylor series sum_k taylor[k] h^k, h = a - a(0).
Jet compose(const Jet& a, std::span<const double> taylor);

Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double exponent);
Jet reciprocal(const Jet& a);

}  // namespace bracketgeo
