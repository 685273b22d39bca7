#include "eemax/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace eemax {

SpatialMesh::SpatialMesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) throw std::invalid_argument("mesh needs at least two elements");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("mesh nodes must be strictly increasing (node " +
                                  std::to_string(i) + ")");
    }
  }
}

SpatialMesh SpatialMesh::uniform(double x_left, double x_right, std::size_t elements) {
  if (elements < 2) throw std::invalid_argument("mesh needs at least two elements");
  std::vector<double> nodes(elements + 1);
  const double h = (x_right - x_left) / static_cast<double>(elements);
  for (std::size_t i = 0; i <= elements; ++i) nodes[i] = x_left + h * static_cast<double>(i);
  nodes.back() = x_right;
  return SpatialMesh(std::move(nodes));
}

double SpatialMesh::max_width() const {
  double h = 0.0;
  for (std::size_t e = 0; e < elements(); ++e) h = std::max(h, width(e));
  return h;
}

std::size_t SpatialMesh::locate(double x) const {
  auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end() - 1, x);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

NodalField NodalField::zeros(MeshPtr mesh) {
  const auto n = mesh->node_count();
  return NodalField{std::move(mesh), std::vector<double>(n, 0.0)};
}

NodalField NodalField::interpolate(MeshPtr mesh, const SpaceFunction& fn) {
  std::vector<double> values(mesh->node_count());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(mesh->node(i));
  return NodalField{std::move(mesh), std::move(values)};
}

double NodalField::operator()(double x) const {
  const auto e = mesh->locate(x);
  const double s = std::clamp((x - mesh->node(e)) / mesh->width(e), 0.0, 1.0);
  return at_local(e, s);
}

namespace {

void require_same_mesh(const NodalField& a, const NodalField& b) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("nodal fields live on different meshes");
  }
}

}  // namespace

NodalField& NodalField::operator+=(const NodalField& other) {
  require_same_mesh(*this, other);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
  return *this;
}

NodalField& NodalField::operator-=(const NodalField& other) {
  require_same_mesh(*this, other);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= other.values[i];
  return *this;
}

NodalField& NodalField::operator*=(double alpha) {
  for (double& v : values) v *= alpha;
  return *this;
}

NodalField operator+(NodalField a, const NodalField& b) { return a += b; }
NodalField operator-(NodalField a, const NodalField& b) { return a -= b; }
NodalField operator*(double alpha, NodalField a) { return a *= alpha; }

ElementFunction as_element_function(const SpaceFunction& fn) {
  return [fn](std::size_t, double x, double) { return fn(x); };
}

ElementFunction as_element_function(const NodalField& field) {
  return [field](std::size_t e, double, double s) { return field.at_local(e, s); };
}

std::vector<double> TriDiagonalMatrix::apply(std::span<const double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw std::invalid_argument("dimension mismatch in matrix-vector product");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += lower[i] * x[i - 1];
    if (i + 1 < n) acc += upper[i] * x[i + 1];
    y[i] = acc;
  }
  return y;
}

TriDiagonalMatrix TriDiagonalMatrix::plus_scaled(double alpha, const TriDiagonalMatrix& other) const {
  if (other.size() != size()) throw std::invalid_argument("dimension mismatch in matrix sum");
  TriDiagonalMatrix out(*this);
  for (std::size_t i = 0; i < size(); ++i) {
    out.lower[i] += alpha * other.lower[i];
    out.diag[i] += alpha * other.diag[i];
    out.upper[i] += alpha * other.upper[i];
  }
  return out;
}

bool TriDiagonalMatrix::strictly_diagonally_dominant() const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const double off = (i > 0 ? std::abs(lower[i]) : 0.0) + (i + 1 < n ? std::abs(upper[i]) : 0.0);
    if (!(std::abs(diag[i]) > off)) return false;
  }
  return true;
}

bool TriDiagonalMatrix::symmetric(double tol) const {
  for (std::size_t i = 0; i + 1 < size(); ++i) {
    if (std::abs(upper[i] - lower[i + 1]) > tol) return false;
  }
  return true;
}

double TriDiagonalMatrix::norm_inf() const {
  const std::size_t n = size();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double row = std::abs(diag[i]) + (i > 0 ? std::abs(lower[i]) : 0.0) +
                       (i + 1 < n ? std::abs(upper[i]) : 0.0);
    m = std::max(m, row);
  }
  return m;
}

TriDiagonalMatrix assemble_stiffness(const SpatialMesh& mesh, double diffusion,
                                     const SpaceFunction& reaction) {
  const std::size_t n = mesh.interior_count();
  TriDiagonalMatrix a(n);
  // Element e couples nodes e and e + 1; interior index of node k is k - 1.
  for (std::size_t e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.width(e);
    const double xl = mesh.node(e);
    const double xr = mesh.node(e + 1);
    const double rl = reaction(xl);
    const double rm = reaction(0.5 * (xl + xr));
    const double rr = reaction(xr);
    if (!(rl >= 0.0 && rm >= 0.0 && rr >= 0.0)) {
      throw std::invalid_argument("negative reaction coefficient in element " + std::to_string(e));
    }
    // Simpson: h/6 (q(xl) + 4 q(xm) + q(xr)) with phi_l = (1, 1/2, 0), phi_r = (0, 1/2, 1)
    const double k_ll = diffusion / h + h / 6.0 * (rl + rm);
    const double k_rr = diffusion / h + h / 6.0 * (rm + rr);
    const double k_lr = -diffusion / h + h / 6.0 * rm;
    const bool left_interior = e > 0;
    const bool right_interior = e + 1 < mesh.elements();
    if (left_interior) a.diag[e - 1] += k_ll;
    if (right_interior) a.diag[e] += k_rr;
    if (left_interior && right_interior) {
      a.upper[e - 1] += k_lr;
      a.lower[e] += k_lr;
    }
  }
  return a;
}

TriDiagonalMatrix assemble_mass(const SpatialMesh& mesh) {
  const std::size_t n = mesh.interior_count();
  TriDiagonalMatrix m(n);
  for (std::size_t e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.width(e);
    const bool left_interior = e > 0;
    const bool right_interior = e + 1 < mesh.elements();
    if (left_interior) m.diag[e - 1] += h / 3.0;
    if (right_interior) m.diag[e] += h / 3.0;
    if (left_interior && right_interior) {
      m.upper[e - 1] += h / 6.0;
      m.lower[e] += h / 6.0;
    }
  }
  return m;
}

std::vector<double> assemble_load(const SpatialMesh& mesh, const ElementFunction& g) {
  std::vector<double> b(mesh.interior_count(), 0.0);
  for (std::size_t e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.width(e);
    const double xl = mesh.node(e);
    const double xr = mesh.node(e + 1);
    const double gl = g(e, xl, 0.0);
    const double gm = g(e, 0.5 * (xl + xr), 0.5);
    const double gr = g(e, xr, 1.0);
    if (e > 0) b[e - 1] += h / 6.0 * (gl + 2.0 * gm);
    if (e + 1 < mesh.elements()) b[e] += h / 6.0 * (2.0 * gm + gr);
  }
  return b;
}

std::vector<double> assemble_load(const SpatialMesh& mesh, const SpaceFunction& g) {
  return assemble_load(mesh, as_element_function(g));
}

std::vector<double> solve_tridiagonal(const TriDiagonalMatrix& matrix, std::span<const double> rhs) {
  const std::size_t n = matrix.size();
  if (rhs.size() != n) throw std::invalid_argument("dimension mismatch in tridiagonal solve");
  std::vector<double> c(n, 0.0);
  std::vector<double> x(rhs.begin(), rhs.end());
  double pivot = matrix.diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) pivot = matrix.diag[i] - matrix.lower[i] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw std::runtime_error("zero pivot in tridiagonal solve at row " + std::to_string(i));
    }
    c[i] = (i + 1 < n) ? matrix.upper[i] / pivot : 0.0;
    x[i] = (i > 0 ? x[i] - matrix.lower[i] * x[i - 1] : x[i]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

std::vector<double> interior_values(const NodalField& field) {
  return {field.values.begin() + 1, field.values.end() - 1};
}

NodalField from_interior(MeshPtr mesh, std::span<const double> interior) {
  NodalField f = NodalField::zeros(std::move(mesh));
  if (interior.size() + 2 != f.values.size()) {
    throw std::invalid_argument("interior vector does not match mesh");
  }
  std::copy(interior.begin(), interior.end(), f.values.begin() + 1);
  return f;
}

NodalField solve_elliptic(MeshPtr mesh, double diffusion, const SpaceFunction& reaction,
                          const ElementFunction& g) {
  const auto a = assemble_stiffness(*mesh, diffusion, reaction);
  const auto b = assemble_load(*mesh, g);
  const auto x = solve_tridiagonal(a, b);
  return from_interior(std::move(mesh), x);
}

double sup_norm(const NodalField& field) {
  double m = 0.0;
  for (double v : field.values) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const SpatialMesh& mesh, const ElementFunction& fn, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 2);
  double m = 0.0;
  for (std::size_t e = 0; e < mesh.elements(); ++e) {
    const double xl = mesh.node(e);
    const double h = mesh.width(e);
    for (std::size_t k = 0; k < samples; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(samples - 1);
      m = std::max(m, std::abs(fn(e, xl + s * h, s)));
    }
  }
  return m;
}

}  // namespace eemax
