#include "bracketgeo/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <unordered_map>

#include "bracketgeo/error.hpp"

namespace bracketgeo {

namespace {

void enumerate_degree(int dim, int total, MultiDegree& cur, int axis, std::vector<MultiDegree>& out) {
  if (axis == dim - 1) {
    cur[static_cast<std::size_t>(axis)] = total;
    out.push_back(cur);
    return;
  }
  for (int d = total; d >= 0; --d) {
    cur[static_cast<std::size_t>(axis)] = d;
    enumerate_degree(dim, total - d, cur, axis + 1, out);
  }
}

std::uint64_t encode(std::span<const int> deg, int order) {
  std::uint64_t key = 0;
  for (auto it = deg.rbegin(); it != deg.rend(); ++it) key = key * static_cast<std::uint64_t>(order + 1) + static_cast<std::uint64_t>(*it);
  return key;
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>>& layout_cache() {
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  return cache;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

bool is_integer(double x) { return std::isfinite(x) && std::floor(x) == x && std::abs(x) < 1e9; }

}  // namespace

JetLayout::JetLayout(int dim, int order) : dim_(dim), order_(order) {
  if (dim < 1) throw ShapeError("jet dimension must be >= 1");
  if (order < 0) throw ShapeError("jet order must be >= 0");
  MultiDegree cur(static_cast<std::size_t>(dim), 0);
  for (int t = 0; t <= order; ++t) {
    enumerate_degree(dim, t, cur, 0, degrees_);
    prefix_.push_back(degrees_.size());
  }
  for (const auto& d : degrees_) {
    int t = 0;
    double f = 1.0;
    for (int v : d) {
      t += v;
      f *= factorial(v);
    }
    totals_.push_back(t);
    fact_.push_back(f);
  }
  for (std::size_t i = 0; i < degrees_.size(); ++i) index_.emplace(encode(degrees_[i], order), static_cast<std::uint32_t>(i));

  const std::size_t size = degrees_.size();
  MultiDegree sum(static_cast<std::size_t>(dim));
  for (std::size_t a = 0; a < size; ++a) {
    for (std::size_t b = 0; b < size; ++b) {
      if (totals_[a] + totals_[b] > order) continue;
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = degrees_[a][k] + degrees_[b][k];
      mul_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), index_.at(encode(sum, order))});
    }
  }
  std::stable_sort(mul_.begin(), mul_.end(), [](const MulTerm& x, const MulTerm& y) { return x.out < y.out; });

  deriv_.resize(static_cast<std::size_t>(dim));
  if (order >= 1) {
    const std::size_t lower = prefix_[static_cast<std::size_t>(order - 1)];
    for (std::size_t axis = 0; axis < deriv_.size(); ++axis) {
      auto& table = deriv_[axis];
      table.reserve(lower);
      for (std::size_t k = 0; k < lower; ++k) {
        MultiDegree d = degrees_[k];
        d[axis] += 1;
        table.push_back({index_.at(encode(d, order)), static_cast<double>(d[axis])});
      }
    }
  }
}

std::shared_ptr<const JetLayout> JetLayout::get(int dim, int order) {
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto& cache = layout_cache();
  auto key = std::make_pair(dim, order);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto layout = std::make_shared<const JetLayout>(dim, order);
  cache.emplace(key, layout);
  return layout;
}

long JetLayout::index_of(std::span<const int> deg) const {
  if (static_cast<int>(deg.size()) != dim_) throw ShapeError("multi-degree has wrong dimension");
  int total = 0;
  for (int d : deg) {
    if (d < 0) return -1;
    total += d;
  }
  if (total > order_) return -1;
  return static_cast<long>(index_.at(encode(deg, order_)));
}

// ---------------------------------------------------------------------------

Jet Jet::constant(double value, int dim, int order) {
  auto layout = JetLayout::get(dim, order);
  std::vector<double> c(layout->size(), 0.0);
  c[0] = value;
  return Jet(std::move(layout), std::move(c));
}

Jet Jet::variable(int index, double value, int dim, int order) {
  if (index < 0 || index >= dim) throw ShapeError("jet variable index " + std::to_string(index) + " out of range for dimension " + std::to_string(dim));
  if (order < 1) throw ShapeError("jet variable requires order >= 1");
  Jet j = constant(value, dim, order);
  // Degree e_index is at rank 1 + index in the ranked enumeration.
  j.coeffs_[static_cast<std::size_t>(1 + index)] = 1.0;
  return j;
}

Jet Jet::constant_like(double value, const Jet& like) {
  std::vector<double> c(like.layout_->size(), 0.0);
  c[0] = value;
  return Jet(like.layout_, std::move(c));
}

double Jet::coeff(std::span<const int> deg) const {
  long idx = layout_->index_of(deg);
  if (idx < 0) throw ShapeError("multi-degree exceeds jet order");
  return coeffs_[static_cast<std::size_t>(idx)];
}

double Jet::partial(std::span<const int> deg) const {
  long idx = layout_->index_of(deg);
  if (idx < 0) throw ShapeError("multi-degree exceeds jet order");
  return coeffs_[static_cast<std::size_t>(idx)] * layout_->factorial_weight(static_cast<std::size_t>(idx));
}

double Jet::partial1(int axis) const {
  if (axis < 0 || axis >= dim()) throw ShapeError("axis out of range");
  if (order() < 1) throw ShapeError("jet order too low for a first partial");
  return coeffs_[static_cast<std::size_t>(1 + axis)];
}

Jet Jet::derivative(int axis) const {
  if (axis < 0 || axis >= dim()) throw ShapeError("axis out of range");
  if (order() < 1) throw ShapeError("cannot differentiate an order-0 jet");
  auto out_layout = JetLayout::get(dim(), order() - 1);
  const auto& table = layout_->deriv_table(axis);
  std::vector<double> c(out_layout->size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = coeffs_[table[k].src] * table[k].factor;
  return Jet(std::move(out_layout), std::move(c));
}

Jet Jet::truncated(int new_order) const {
  if (new_order > order()) throw ShapeError("cannot raise jet order by truncation");
  if (new_order == order()) return *this;
  Jet out = *this;
  out.lower_to(new_order);
  return out;
}

void Jet::lower_to(int new_order) {
  layout_ = JetLayout::get(dim(), new_order);
  coeffs_.resize(layout_->size());
}

Jet Jet::restricted(int leading) const {
  if (leading < 1 || leading > dim()) throw ShapeError("restriction dimension out of range");
  if (leading == dim()) return *this;
  auto out_layout = JetLayout::get(leading, order());
  std::vector<double> c(out_layout->size());
  MultiDegree full(static_cast<std::size_t>(dim()), 0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto& d = out_layout->degree(k);
    std::copy(d.begin(), d.end(), full.begin());
    c[k] = coeffs_[static_cast<std::size_t>(layout_->index_of(full))];
  }
  return Jet(std::move(out_layout), std::move(c));
}

Jet Jet::widened(int new_dim) const {
  if (new_dim < dim()) throw ShapeError("cannot widen to a smaller dimension");
  if (new_dim == dim()) return *this;
  auto out_layout = JetLayout::get(new_dim, order());
  std::vector<double> c(out_layout->size(), 0.0);
  MultiDegree full(static_cast<std::size_t>(new_dim), 0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    const auto& d = layout_->degree(k);
    std::copy(d.begin(), d.end(), full.begin());
    c[static_cast<std::size_t>(out_layout->index_of(full))] = coeffs_[k];
  }
  return Jet(std::move(out_layout), std::move(c));
}

namespace {
void check_dims(const Jet& a, const Jet& b) {
  if (a.empty() || b.empty()) throw ShapeError("operation on an empty jet");
  if (a.dim() != b.dim()) throw ShapeError("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}
}  // namespace

Jet& Jet::operator+=(const Jet& o) {
  check_dims(*this, o);
  if (o.order() < order()) lower_to(o.order());
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_dims(*this, o);
  if (o.order() < order()) lower_to(o.order());
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  check_dims(a, b);
  const auto& layout = a.order() <= b.order() ? a.layout_ : b.layout_;
  std::vector<double> c(layout->size(), 0.0);
  const double* pa = a.coeffs_.data();
  const double* pb = b.coeffs_.data();
  for (const auto& t : layout->mul_table()) c[t.out] += pa[t.a] * pb[t.b];
  return Jet(layout, std::move(c));
}

void Jet::fma(const Jet& b, const Jet& c) {
  check_dims(*this, b);
  check_dims(*this, c);
  int o = std::min({order(), b.order(), c.order()});
  if (o < order()) lower_to(o);
  const double* pb = b.coeffs_.data();
  const double* pc = c.coeffs_.data();
  for (const auto& t : layout_->mul_table()) coeffs_[t.out] += pb[t.a] * pc[t.b];
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }

Jet& Jet::operator+=(double s) {
  coeffs_[0] += s;
  return *this;
}

Jet& Jet::operator-=(double s) {
  coeffs_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : coeffs_) v *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  if (s == 0.0) throw DomainError("division of a jet by zero");
  for (double& v : coeffs_) v /= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& v : out.coeffs_) v = -v;
  return out;
}

// ---------------------------------------------------------------------------

Jet compose(const Jet& a, std::span<const double> taylor) {
  const int k_max = std::min<int>(a.order(), static_cast<int>(taylor.size()) - 1);
  Jet h = a;
  h.coeffs_[0] = 0.0;
  Jet result = Jet::constant_like(taylor[static_cast<std::size_t>(k_max)], a);
  for (int k = k_max - 1; k >= 0; --k) {
    result = result * h;
    result.coeffs_[0] += taylor[static_cast<std::size_t>(k)];
  }
  return result;
}

namespace {

std::vector<double> cyclic_series(int order, std::span<const double> cycle) {
  std::vector<double> t(static_cast<std::size_t>(order + 1));
  for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = cycle[static_cast<std::size_t>(k) % cycle.size()] / factorial(k);
  return t;
}

Jet integer_power(const Jet& a, long p) {
  Jet result = Jet::constant_like(1.0, a);
  Jet base = a;
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

}  // namespace

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cycle[] = {s, c, -s, -c};
  return compose(a, cyclic_series(a.order(), cycle));
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cycle[] = {c, -s, -c, s};
  return compose(a, cyclic_series(a.order(), cycle));
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  const double cycle[] = {e};
  return compose(a, cyclic_series(a.order(), cycle));
}

Jet sinh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  const double cycle[] = {s, c};
  return compose(a, cyclic_series(a.order(), cycle));
}

Jet cosh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  const double cycle[] = {c, s};
  return compose(a, cyclic_series(a.order(), cycle));
}

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("log of non-positive value " + std::to_string(x));
  std::vector<double> t(static_cast<std::size_t>(a.order() + 1));
  t[0] = std::log(x);
  for (int k = 1; k <= a.order(); ++k) t[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(x, k));
  return compose(a, t);
}

Jet reciprocal(const Jet& a) {
  const double x = a.value();
  if (x == 0.0) throw DomainError("division by a jet with zero constant term");
  std::vector<double> t(static_cast<std::size_t>(a.order() + 1));
  double p = 1.0 / x;
  for (int k = 0; k <= a.order(); ++k) {
    t[static_cast<std::size_t>(k)] = (k % 2 ? -p : p);
    p /= x;
  }
  return compose(a, t);
}

Jet pow(const Jet& a, double exponent) {
  if (is_integer(exponent)) {
    long p = static_cast<long>(exponent);
    Jet out = p >= 0 ? integer_power(a, p) : integer_power(reciprocal(a), -p);
    // keep the value bit-identical to real evaluation
    out.coeffs()[0] = std::pow(a.value(), exponent);
    return out;
  }
  const double x = a.value();
  if (a.order() == 0) {
    if (x < 0.0) throw DomainError("non-integer power of negative value");
    return Jet::constant_like(std::pow(x, exponent), a);
  }
  if (!(x > 0.0)) throw DomainError("non-integer power of non-positive value " + std::to_string(x));
  std::vector<double> t(static_cast<std::size_t>(a.order() + 1));
  double binom = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    t[static_cast<std::size_t>(k)] = binom * std::pow(x, exponent - k);
    binom *= (exponent - k) / (k + 1);
  }
  return compose(a, t);
}

Jet sqrt(const Jet& a) {
  if (a.order() > 0 && !(a.value() > 0.0)) throw DomainError("sqrt of non-positive value " + std::to_string(a.value()));
  if (a.value() < 0.0) throw DomainError("sqrt of negative value");
  if (a.order() == 0) return Jet::constant_like(std::sqrt(a.value()), a);
  Jet out = pow(a, 0.5);
  out.coeffs()[0] = std::sqrt(a.value());
  return out;
}

}  // namespace bracketgeo
