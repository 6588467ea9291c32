#include "bracketgeo/jet_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "bracketgeo/error.hpp"

namespace bracketgeo {

namespace {

std::size_t pivot_row(const std::vector<Jet>& a, std::size_t m, std::size_t col) {
  std::size_t best = col;
  for (std::size_t r = col + 1; r < m; ++r) {
    if (std::abs(a[r * m + col].value()) > std::abs(a[best * m + col].value())) best = r;
  }
  return best;
}

double max_abs_value(std::span<const Jet> a) {
  double s = 0;
  for (const auto& j : a) s = std::max(s, std::abs(j.value()));
  return s;
}

}  // namespace

std::vector<Jet> jet_inverse(std::span<const Jet> in, int mi) {
  const auto m = static_cast<std::size_t>(mi);
  if (in.size() != m * m) throw ShapeError("jet_inverse: matrix size mismatch");
  const double tiny = 1e-14 * std::max(1.0, max_abs_value(in));
  std::vector<Jet> a(in.begin(), in.end());
  std::vector<Jet> inv(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) inv[i * m + j] = Jet::constant_like(i == j ? 1.0 : 0.0, a[0]);
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t p = pivot_row(a, m, c);
    if (std::abs(a[p * m + c].value()) <= tiny) throw DomainError("singular matrix");
    if (p != c) {
      for (std::size_t j = 0; j < m; ++j) {
        std::swap(a[p * m + j], a[c * m + j]);
        std::swap(inv[p * m + j], inv[c * m + j]);
      }
    }
    const Jet r = reciprocal(a[c * m + c]);
    for (std::size_t j = 0; j < m; ++j) {
      a[c * m + j] *= r;
      inv[c * m + j] *= r;
    }
    for (std::size_t row = 0; row < m; ++row) {
      if (row == c) continue;
      const Jet f = a[row * m + c];
      if (f.value() == 0.0 && std::all_of(f.coeffs().begin(), f.coeffs().end(), [](double v) { return v == 0.0; })) continue;
      for (std::size_t j = 0; j < m; ++j) {
        a[row * m + j] -= f * a[c * m + j];
        inv[row * m + j] -= f * inv[c * m + j];
      }
    }
  }
  return inv;
}

Jet jet_determinant(std::span<const Jet> in, int mi) {
  const auto m = static_cast<std::size_t>(mi);
  if (in.size() != m * m) throw ShapeError("jet_determinant: matrix size mismatch");
  std::vector<Jet> a(in.begin(), in.end());
  Jet det = Jet::constant_like(1.0, a[0]);
  for (std::size_t c = 0; c < m; ++c) {
    const std::size_t p = pivot_row(a, m, c);
    if (a[p * m + c].value() == 0.0) {
      // Singular at the point; fall back to the permutation expansion so the
      // jet still carries the derivatives of the determinant.
      std::vector<std::size_t> perm(m);
      for (std::size_t k = 0; k < m; ++k) perm[k] = k;
      Jet sum = Jet::constant_like(0.0, in[0]);
      do {
        int sign = 1;
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = i + 1; j < m; ++j)
            if (perm[i] > perm[j]) sign = -sign;
        Jet term = Jet::constant_like(static_cast<double>(sign), in[0]);
        for (std::size_t i = 0; i < m; ++i) term *= in[i * m + perm[i]];
        sum += term;
      } while (std::next_permutation(perm.begin(), perm.end()));
      return sum;
    }
    if (p != c) {
      for (std::size_t j = 0; j < m; ++j) std::swap(a[p * m + j], a[c * m + j]);
      det = -det;
    }
    det *= a[c * m + c];
    const Jet r = reciprocal(a[c * m + c]);
    for (std::size_t row = c + 1; row < m; ++row) {
      const Jet f = a[row * m + c] * r;
      for (std::size_t j = c; j < m; ++j) a[row * m + j] -= f * a[c * m + j];
    }
  }
  return det;
}

std::vector<double> jet_values(std::span<const Jet> a) {
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& j : a) out.push_back(j.value());
  return out;
}

}  // namespace bracketgeo
