#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eemax/fem1d.hpp"
#include "eemax/problem.hpp"

namespace eemax {

class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// High-accuracy approximation of u(., T) sampled on a fine uniform grid.
struct ReferenceSolution {
  /// Sampling grid.
  MeshPtr mesh;
  std::vector<double> values;
  /// Sup-norm distance to the next refinement level.
  double accuracy = 0.0;
  double tol = 0.0;
  std::size_t steps = 0;

  NodalField field() const { return NodalField{mesh, values}; }
};

struct OracleOptions {
  double tol = 1e-9;
  /// Elements of the coarsest computational mesh.
  std::size_t elements = 1024;
  /// Crank-Nicolson steps of the coarsest time level.
  std::size_t steps = 256;
  /// Elements of the output sampling grid; must be a multiple of `elements`.
  std::size_t sample_elements = 8192;
  /// Extra doublings of (elements, steps) tried when tol is not met.
  std::size_t max_refinements = 2;
  /// Directory for cached solutions; empty disables caching.
  std::string cache_dir;
};

/// Crank-Nicolson on the P1 semi-discretisation; the first two steps are replaced by
/// four backward Euler steps of size tau / 2 to damp the start-up transient.
std::vector<double> crank_nicolson(const ProblemSpec& spec, const SpatialMesh& mesh,
                                   std::size_t steps);

/// Richardson in time (steps, 2 steps) and in space (elements, 2 elements), compared
/// against the same construction one level finer, then carried to the sampling grid by
/// local degree-5 Lagrange interpolation. Throws OracleFailure when the difference
/// stays above tol after max_refinements doublings.
ReferenceSolution solve_reference(const ProblemSpec& spec, const OracleOptions& options = {});

/// max |u_h(x) - u_ref(x)| over the reference mesh nodes, u_h interpolated linearly.
double error_at_T(const NodalField& approximation, const ReferenceSolution& reference);

/// Degree-5 Lagrange interpolation of uniform nodal data at x.
double lagrange5(const SpatialMesh& mesh, std::span<const double> values, double x);

/// Cache file name for a (problem, options) pair.
std::string reference_cache_key(const ProblemSpec& spec, const OracleOptions& options);

/// Little-endian binary cache: 8-byte magic, version, header, values.
void write_reference(const std::string& path, const ReferenceSolution& ref, std::uint64_t key);
std::optional<ReferenceSolution> read_reference(const std::string& path, std::uint64_t key);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace eemax
