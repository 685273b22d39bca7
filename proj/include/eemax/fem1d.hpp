#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "eemax/problem.hpp"

namespace eemax {

/// Partition x_0 < x_1 < ... < x_N of a closed interval.
class SpatialMesh {
 public:
  explicit SpatialMesh(std::vector<double> nodes);
  static SpatialMesh uniform(double x_left, double x_right, std::size_t elements);

  std::size_t elements() const { return nodes_.size() - 1; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t interior_count() const { return nodes_.size() - 2; }
  std::span<const double> nodes() const { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }
  /// Width of element e = [x_e, x_{e+1}].
  double width(std::size_t e) const { return nodes_[e + 1] - nodes_[e]; }
  double max_width() const;
  double x_left() const { return nodes_.front(); }
  double x_right() const { return nodes_.back(); }
  /// Element containing x (the left one at interior nodes).
  std::size_t locate(double x) const;

 private:
  std::vector<double> nodes_;
};

using MeshPtr = std::shared_ptr<const SpatialMesh>;

/// Continuous piecewise-linear function given by its nodal values.
struct NodalField {
  MeshPtr mesh;
  std::vector<double> values;

  static NodalField zeros(MeshPtr mesh);
  static NodalField interpolate(MeshPtr mesh, const SpaceFunction& fn);

  std::size_t size() const { return values.size(); }
  /// Value at local coordinate s in [0, 1] of element e.
  double at_local(std::size_t e, double s) const {
    return (1.0 - s) * values[e] + s * values[e + 1];
  }
  double operator()(double x) const;
  bool vanishes_on_boundary() const { return values.front() == 0.0 && values.back() == 0.0; }

  NodalField& operator+=(const NodalField& other);
  NodalField& operator-=(const NodalField& other);
  NodalField& operator*=(double alpha);
};

NodalField operator+(NodalField a, const NodalField& b);
NodalField operator-(NodalField a, const NodalField& b);
NodalField operator*(double alpha, NodalField a);

/// Function that is cheap to evaluate element by element: (element, x, local s).
using ElementFunction = std::function<double(std::size_t e, double x, double s)>;

ElementFunction as_element_function(const SpaceFunction& fn);
ElementFunction as_element_function(const NodalField& field);

/// Tridiagonal matrix acting on the N - 1 interior nodes.
/// lower[0] and upper[n - 1] are unused and kept at zero.
struct TriDiagonalMatrix {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit TriDiagonalMatrix(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  std::size_t size() const { return diag.size(); }
  std::vector<double> apply(std::span<const double> x) const;
  /// this + alpha * other
  TriDiagonalMatrix plus_scaled(double alpha, const TriDiagonalMatrix& other) const;
  bool strictly_diagonally_dominant() const;
  bool symmetric(double tol = 0.0) const;
  /// Largest absolute row sum.
  double norm_inf() const;
};

struct TriDiagonalSystem {
  TriDiagonalMatrix matrix;
  std::vector<double> rhs;
};

/// a_h(phi_i, phi_j) = int eps phi_i' phi_j' + r phi_i phi_j, with the
/// reaction part integrated by Simpson's rule on every element.
TriDiagonalMatrix assemble_stiffness(const SpatialMesh& mesh, double diffusion,
                                     const SpaceFunction& reaction);
/// Consistent P1 mass matrix (exact).
TriDiagonalMatrix assemble_mass(const SpatialMesh& mesh);
/// (g, phi_i)_h for every interior node, element-wise Simpson rule.
std::vector<double> assemble_load(const SpatialMesh& mesh, const SpaceFunction& g);
std::vector<double> assemble_load(const SpatialMesh& mesh, const ElementFunction& g);

/// Thomas algorithm. Throws std::runtime_error on a vanishing pivot.
std::vector<double> solve_tridiagonal(const TriDiagonalMatrix& matrix, std::span<const double> rhs);
inline std::vector<double> solve_tridiagonal(const TriDiagonalSystem& system) {
  return solve_tridiagonal(system.matrix, system.rhs);
}

/// Interior values of a field / a V_h field from interior values.
std::vector<double> interior_values(const NodalField& field);
NodalField from_interior(MeshPtr mesh, std::span<const double> interior);

/// Solves a_h(y_h, chi) = (g, chi)_h for y_h in V_h.
NodalField solve_elliptic(MeshPtr mesh, double diffusion, const SpaceFunction& reaction,
                          const ElementFunction& g);

inline constexpr std::size_t kDefaultSamplesPerElement = 9;

/// Exact sup-norm of a P1 field (extrema sit at nodes).
double sup_norm(const NodalField& field);
/// max |fn| over `samples` equispaced points per element, endpoints included.
double sup_norm(const SpatialMesh& mesh, const ElementFunction& fn,
                std::size_t samples = kDefaultSamplesPerElement);

}  // namespace eemax
