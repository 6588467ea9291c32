#pragma once

// Small dense matrices of jets, stored row-major.

#include <span>
#include <vector>

#include "bracketgeo/jet.hpp"

namespace bracketgeo {

/// Inverse of an m x m jet matrix by Gauss-Jordan elimination with partial
/// pivoting on the constant coefficients. Throws DomainError when singular.
std::vector<Jet> jet_inverse(std::span<const Jet> a, int m);

Jet jet_determinant(std::span<const Jet> a, int m);

/// Constant coefficients of a jet matrix.
std::vector<double> jet_values(std::span<const Jet> a);

}  // namespace bracketgeo
