#pragma once

// High-order central finite differences, used as an independent check on
// jet partials. Stencil weights come from solving the Vandermonde system
// sum_k w_k k^j = d! delta_{jd} on the points -p..p.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace fdtest {

inline std::vector<double> stencil(int derivative, int half_width) {
  const int npts = 2 * half_width + 1;
  Eigen::MatrixXd v(npts, npts);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(npts);
  for (int j = 0; j < npts; ++j) {
    for (int k = 0; k < npts; ++k) v(j, k) = std::pow(static_cast<double>(k - half_width), j);
  }
  double fact = 1;
  for (int j = 2; j <= derivative; ++j) fact *= j;
  rhs(derivative) = fact;
  Eigen::VectorXd w = v.fullPivLu().solve(rhs);
  return {w.data(), w.data() + npts};
}

using ScalarFn = std::function<double(std::span<const double>)>;

/// Mixed partial of multi-degree `deg` at `u` by a tensor-product stencil.
inline double partial(const ScalarFn& f, std::span<const double> u, std::span<const int> deg, double h, int half_width = 5) {
  const std::size_t n = u.size();
  std::vector<std::vector<double>> w(n);
  int total = 0;
  for (std::size_t a = 0; a < n; ++a) {
    w[a] = stencil(deg[a], deg[a] == 0 ? 0 : half_width);
    total += deg[a];
  }
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> pt(u.begin(), u.end());
  double sum = 0;
  while (true) {
    double weight = 1;
    for (std::size_t a = 0; a < n; ++a) {
      const int hw = static_cast<int>(w[a].size() / 2);
      pt[a] = u[a] + h * (static_cast<int>(idx[a]) - hw);
      weight *= w[a][idx[a]];
    }
    if (weight != 0) sum += weight * f(pt);
    std::size_t a = 0;
    for (; a < n; ++a) {
      if (++idx[a] < w[a].size()) break;
      idx[a] = 0;
    }
    if (a == n) break;
  }
  return sum / std::pow(h, total);
}

}  // namespace fdtest
