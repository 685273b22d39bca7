#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "eemax/fem1d.hpp"
#include "eemax/problem.hpp"

namespace support {

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-14);
}

/// P1 hat function of node i.
inline double hat(const eemax::SpatialMesh& mesh, std::size_t i, double x) {
  const auto n = mesh.nodes();
  if (i > 0 && x >= n[i - 1] && x <= n[i]) return (x - n[i - 1]) / (n[i] - n[i - 1]);
  if (i + 1 < n.size() && x >= n[i] && x <= n[i + 1]) return (n[i + 1] - x) / (n[i + 1] - n[i]);
  return 0.0;
}

inline double hat_slope(const eemax::SpatialMesh& mesh, std::size_t i, double x) {
  const auto n = mesh.nodes();
  if (i > 0 && x > n[i - 1] && x < n[i]) return 1.0 / (n[i] - n[i - 1]);
  if (i + 1 < n.size() && x > n[i] && x < n[i + 1]) return -1.0 / (n[i + 1] - n[i]);
  return 0.0;
}

/// Element-by-element quadrature of fn over the support of hat i.
inline double over_support(const eemax::SpatialMesh& mesh, std::size_t i,
                           const std::function<double(double)>& fn) {
  const auto n = mesh.nodes();
  double sum = 0.0;
  if (i > 0) sum += integrate(fn, n[i - 1], n[i]);
  if (i + 1 < n.size()) sum += integrate(fn, n[i], n[i + 1]);
  return sum;
}

/// Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    }
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    if (a[k][k] == 0.0) throw std::runtime_error("singular");
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a[i][k] / a[k][k];
      for (std::size_t c = k; c < n; ++c) a[i][c] -= l * a[k][c];
      b[i] -= l * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= a[k][c] * x[c];
    x[k] = s / a[k][k];
  }
  return x;
}

inline eemax::MeshPtr uniform_mesh(double a, double b, std::size_t n) {
  return std::make_shared<const eemax::SpatialMesh>(eemax::SpatialMesh::uniform(a, b, n));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace support
