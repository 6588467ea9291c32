#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bracketgeo/expr.hpp"
#include "bracketgeo/jet.hpp"

namespace bracketgeo {

using ChartPoint = std::vector<double>;

/// Metric eta_ij of the ambient space, either a constant diagonal of signs or
/// a symmetric matrix of expressions in the ambient coordinates x1..xm.
class AmbientMetric {
 public:
  static AmbientMetric diagonal(std::vector<int> signs);
  static AmbientMetric general(std::vector<std::vector<Expr>> entries);

  int dim() const { return dim_; }
  bool is_diagonal() const { return general_.empty(); }
  const std::vector<int>& signs() const { return signs_; }
  const Expr& entry(int i, int j) const;

  /// eta_ij evaluated on ambient-coordinate jets (composition with the embedding).
  std::vector<Jet> eval_jets(std::span<const Jet> x) const;
  /// eta_ij at a point of the ambient space.
  std::vector<double> eval(std::span<const double> x) const;

 private:
  int dim_ = 0;
  std::vector<int> signs_;
  std::vector<std::vector<Expr>> general_;
};

/// The multivector theta defining the (N+1)-bracket
///   {f0, f1, ..., fN} = theta^{a a1..aN} d_a f0 d_a1 f1 ... d_aN fN.
class BracketStructure {
 public:
  enum class Kind { NambuDensity, PoissonTheta, Multivector };

  struct Entry {
    std::vector<int> index;  // N+1 chart axes, 0-based
    Expr value;
  };

  /// theta = epsilon^{a1..an} / rho; arity n.
  static BracketStructure nambu(Expr rho, int n);
  /// theta^{ab} from the strict upper triangle of `theta`; the lower triangle
  /// is kept only so validation can report how far it is from -theta^{ba}.
  static BracketStructure poisson(std::vector<std::vector<Expr>> theta);
  /// Arbitrary table of entries (unlisted entries are zero). When
  /// `antisymmetric` is set, each entry is expanded over all permutations
  /// of its index with the permutation sign.
  static BracketStructure multivector(int n, int arity, std::vector<Entry> entries, bool antisymmetric);

  Kind kind() const { return kind_; }
  int arity() const { return arity_; }
  /// N, the number of slots after the first.
  int order_n() const { return arity_ - 1; }
  int chart_dim() const { return n_; }
  bool antisymmetric() const { return antisymmetric_; }

  const Expr& rho() const { return rho_; }
  /// Declared theta^{ab} as given by the user (Poisson only).
  const std::vector<std::vector<Expr>>& poisson_declared() const { return declared_; }
  /// Structurally non-zero entries of theta, expanded.
  const std::vector<Entry>& entries() const { return entries_; }
  /// For Nambu structures: signs of the permutations stored in entries().
  const std::vector<int>& entry_signs() const { return signs_; }

 private:
  Kind kind_ = Kind::Multivector;
  int n_ = 0;
  int arity_ = 0;
  bool antisymmetric_ = false;
  Expr rho_;
  std::vector<std::vector<Expr>> declared_;
  std::vector<Entry> entries_;
  std::vector<int> signs_;
};

struct ChartDomain {
  std::vector<std::pair<double, double>> box;
  double margin = 0.1;
};

/// Deterministic uniform sample of the domain shrunk by its margin.
std::vector<ChartPoint> sample_points(const ChartDomain& domain, int count, std::uint64_t seed);
/// Regular grid over the shrunk domain; counts.size() must match the dimension.
std::vector<ChartPoint> grid_points(const ChartDomain& domain, std::span<const int> counts);

struct EmbeddedManifold {
  std::string name;
  int n = 0;
  int m = 0;
  std::vector<Expr> embedding;  // x^i(u1..un)
  AmbientMetric ambient;
  BracketStructure bracket;
  std::optional<std::vector<std::vector<Expr>>> normals;  // each an m-vector over u1..un, x1..xm
  ChartDomain domain;

  /// Checks dimensions and arities; throws ConfigError.
  void validate_shape() const;
  std::vector<std::string> chart_names() const { return numbered_names("u", n); }
  std::vector<std::string> ambient_names() const { return numbered_names("x", m); }
};

/// Embedding jets x^i at u with the given order (chart dimension n).
std::vector<Jet> embedding_jets(const EmbeddedManifold& mfld, std::span<const double> u, int order);
/// Chart variable jets u^a at u.
std::vector<Jet> chart_jets(std::span<const double> u, int order);

/// Expression over u1..un followed by x1..xm, the latter composed with the embedding.
Expr parse_field_expr(const EmbeddedManifold& mfld, std::string_view text);
Jet eval_field_expr(const Expr& e, std::span<const Jet> chart, std::span<const Jet> x);

}  // namespace bracketgeo
