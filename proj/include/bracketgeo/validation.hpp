#pragma once

// Checks that a bracket structure is usable: compatibility of the bracket
// square with the induced metric, antisymmetry, Jacobi, divergence-free
// densities and the square of the induced (para-)complex structure.

#include <optional>
#include <span>
#include <vector>

#include "bracketgeo/manifold.hpp"

namespace bracketgeo {

/// max |PP^{ij} / s - g^{ab} d_a x^i d_b x^j| with g from the coordinate pipeline.
double verify_compatibility(const EmbeddedManifold& mfld, std::span<const double> u, int order = 3);

struct StructureCheck {
  double compatibility = 0;
  double antisymmetry = 0;
  /// theta^{ap} d_p theta^{bc} + cyclic; 2-brackets only.
  std::optional<double> jacobi;
  /// d_a(rho theta^{a a1..aN}); Nambu densities, and antisymmetric 2-brackets with rho = (det theta)^{-1/2}.
  std::optional<double> divergence_free;
  /// |J^2 + epsilon Id| with J^a_b = epsilon gamma^{-1} theta^{ac} g_cb; 2-brackets only.
  std::optional<double> j_square;
};

StructureCheck check_structure_at(const EmbeddedManifold& mfld, std::span<const double> u, int order = 3);

struct StructureReport {
  StructureCheck worst;
  ChartPoint worst_point;  // point of the largest compatibility or Jacobi residual
  int points = 0;
  int degenerate = 0;
};

/// Maxima over the given points; degenerate points are counted and skipped.
StructureReport validate_structure(const EmbeddedManifold& mfld, std::span<const ChartPoint> points, int order = 3);

}  // namespace bracketgeo
