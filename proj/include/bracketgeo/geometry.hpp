#pragma once

// Bracket-side geometric operators. Vector fields along the surface are
// m-vectors of chart jets with the index up; plain vectors are their values
// at the frame point. Every derivative of a field is taken through
// D^i(f) = (epsilon/gamma^2) <x^i, f>, never through an extension off the
// surface.

#include <optional>
#include <span>
#include <vector>

#include "bracketgeo/bracket.hpp"

namespace bracketgeo {

using Field = std::vector<Jet>;
using Vector = std::vector<double>;

enum class Character { Tangent, Normal, General };

inline constexpr double kCharacterTolerance = 1e-8;
inline constexpr double kPivotThreshold = 1e-8;

class ConnectionContext {
 public:
  ConnectionContext(const EmbeddedManifold& mfld, std::span<const double> u, FrameOptions options = {});

  const PointFrame& frame() const { return frame_; }
  int n() const { return frame_.n(); }
  int m() const { return frame_.m(); }
  bool flat() const { return flat_; }

  /// Ambient Christoffel symbols Gamma-bar^i_jk along the surface (chart jets).
  const Jet& christoffel(int i, int j, int k) const { return gamma_[index3(i, j, k)]; }
  /// Lowered ambient curvature R-bar_ijkl at x(u); R-bar(X,Y)Z^i = R-bar^i_jkl Z^j X^k Y^l.
  double ambient_riemann(int i, int j, int k, int l) const;

  /// hat-nabla^c Y^i, stored [c * m + i].
  std::vector<Jet> nabla_vector(std::span<const Jet> y) const;
  /// hat-nabla^c W^{jk}, stored [(c * m + j) * m + k].
  std::vector<Jet> nabla_tensor(std::span<const Jet> w) const;
  /// T^{c,ab} = hat-nabla^c Pi^{ab}, computed on first use.
  const std::vector<Jet>& pi_derivative() const;
  /// Values of T fully lowered: L_{c,ab}.
  const std::vector<double>& pi_derivative_lowered() const;

  Vector lower(std::span<const double> v) const { return frame_.lower(v); }
  Field lower(std::span<const Jet> v) const;
  Jet inner(std::span<const Jet> a, std::span<const Jet> b) const;

  /// Throws CharacterError when v is not (numerically) of the declared character.
  void require(std::span<const double> v, Character c, const char* what) const;

  /// Gauss-assembled R_ijkl on ambient indices, computed on first use.
  const std::vector<double>& riemann_tensor() const;

 private:
  std::size_t index3(int i, int j, int k) const { return static_cast<std::size_t>((i * m() + j) * m() + k); }

  PointFrame frame_;
  bool flat_;
  std::vector<Jet> gamma_;
  std::vector<double> rbar_;
  mutable std::optional<std::vector<Jet>> t_;
  mutable std::optional<std::vector<double>> l_;
  mutable std::optional<std::vector<double>> riemann_;
};

Vector values(std::span<const Jet> f);

/// D^i(f) for every i: the gradient of f along the surface.
Field hat_grad(const ConnectionContext& ctx, const Jet& f);
/// X_c hat-nabla^c Y; equals the ambient covariant derivative for tangent X.
Vector hat_nabla_along(const ConnectionContext& ctx, std::span<const double> x, std::span<const Jet> y);
/// nabla_X Y = D(hat-nabla_X Y) for tangent X, Y.
Vector levi_civita(const ConnectionContext& ctx, std::span<const double> x, std::span<const Jet> y);

/// alpha(X,Y)^i = -X_c T^{c,ib} Y_b.
Vector second_fundamental(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y);
Field second_fundamental_field(const ConnectionContext& ctx, std::span<const Jet> x, std::span<const Jet> y);
/// max_k |X^i Y^j (hat-nabla_i D_jk - hat-nabla_j D_ik)|.
double nablah_d_symmetry(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y);

/// B_N^{ij} = -hat-nabla^i N^j, stored [i * m + j].
std::vector<Jet> weingarten_b(const ConnectionContext& ctx, std::span<const Jet> normal);
/// B_N(X)^i = B^{ij} eta_jk X^k.
Vector apply_b(const ConnectionContext& ctx, std::span<const Jet> b, std::span<const double> x);

double riemann(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const double> z,
               std::span<const double> v);
/// Ric_jl = D^{ik} R_ijkl, stored [j * m + l].
std::vector<double> ricci_tensor(const ConnectionContext& ctx);
double ricci(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y);
double scalar_curvature(const ConnectionContext& ctx);

/// eta(R-bar(X,Y)Z, N).
double codazzi_lhs(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const double> z,
                   std::span<const double> normal);
/// eta((hat-nabla_X B_N)(Z), Y) - eta((hat-nabla_Y B_N)(Z), X), the sign that matches
/// eta(R-bar(X,Y)Z, N) under the curvature convention used throughout.
double codazzi_b_form(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const double> z,
                      std::span<const Jet> normal);
/// eta((nabla~_X alpha)(Y,Z) - (nabla~_Y alpha)(X,Z), N) for tangent fields X, Y, Z.
double codazzi_alpha_form(const ConnectionContext& ctx, std::span<const Jet> x, std::span<const Jet> y, std::span<const Jet> z,
                          std::span<const Jet> normal);
/// codazzi_lhs - codazzi_b_form.
double codazzi_residual(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const double> z,
                        std::span<const Jet> normal);

/// The B-form and residual above for one fixed normal, with hat-nabla B_N built once.
class CodazziTerms {
 public:
  CodazziTerms(const ConnectionContext& ctx, std::span<const Jet> normal);
  double b_form(std::span<const double> x, std::span<const double> y, std::span<const double> z) const;
  double residual(std::span<const double> x, std::span<const double> y, std::span<const double> z) const;

 private:
  const ConnectionContext* ctx_;
  std::vector<double> normal_;
  std::vector<double> h_;
};

/// hat-nabla_i X^i.
double divergence(const ConnectionContext& ctx, std::span<const Jet> x);
double laplace_hat(const ConnectionContext& ctx, const Jet& f);
/// Requires a Nambu density structure.
double laplace_nambu(const ConnectionContext& ctx, const Jet& f);
/// Requires an antisymmetric 2-bracket on an even-dimensional surface.
double laplace_kahler(const ConnectionContext& ctx, const Jet& f);
bool nambu_laplace_applicable(const EmbeddedManifold& mfld);
bool kahler_laplace_applicable(const EmbeddedManifold& mfld);

struct DCommutator {
  double residual;    // max_{k,l} |[D^i,D^j](f) P_i^k P_j^l|
  double hypothesis;  // max |D^i_j P^{jk} - P^{ik}|
};
/// Requires a 2-bracket.
DCommutator d_commutator(const ConnectionContext& ctx, const Jet& f);

/// max_k |X_i Y_j (hat-nabla^i hat-nabla^j U^k - hat-nabla^j hat-nabla^i U^k) - (R-bar(X,Y)U)^k|.
double curvature_commutator(const ConnectionContext& ctx, std::span<const double> x, std::span<const double> y, std::span<const Jet> u);

/// Orthonormal normal frame from Pi applied to the ambient basis, pivoted
/// Gram-Schmidt in the eta inner product. Throws DegenerateError on a null pivot.
std::vector<Field> gram_schmidt_normals(const ConnectionContext& ctx);

}  // namespace bracketgeo
