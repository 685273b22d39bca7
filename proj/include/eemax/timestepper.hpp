#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eemax/fem1d.hpp"
#include "eemax/problem.hpp"

namespace eemax {

/// 0 = t_0 < t_1 < ... < t_M = T.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);
  static TimeGrid uniform(double horizon, std::size_t steps);

  std::size_t steps() const { return times_.size() - 1; }
  double time(std::size_t j) const { return times_[j]; }
  /// tau_j = t_j - t_{j-1}, j >= 1.
  double step(std::size_t j) const { return times_[j] - times_[j - 1]; }
  double midpoint(std::size_t j) const { return times_[j] - 0.5 * step(j); }
  double horizon() const { return times_.back(); }
  std::span<const double> times() const { return times_; }

 private:
  std::vector<double> times_;
};

/// Half-integer time levels j - 1/2 live in slot 2j - 1, integer level j in slot 2j.
constexpr std::size_t half_slot(std::size_t j) { return 2 * j - 1; }
constexpr std::size_t full_slot(std::size_t j) { return 2 * j; }

/// One-step states v^j, two-step states w^{j-1/2}, w^j and extrapolated u^j = 2 w^j - v^j.
struct Trajectory {
  std::vector<NodalField> v;  // j = 0..M
  std::vector<NodalField> w;  // slots 0..2M
  std::vector<NodalField> u;  // j = 0..M

  std::size_t steps() const { return v.size() - 1; }
  const NodalField& w_at(std::size_t j) const { return w[full_slot(j)]; }
  const NodalField& w_half(std::size_t j) const { return w[half_slot(j)]; }
};

enum class InitialApproximation { Interpolation, L2Projection };

/// u_h^0: nodal interpolant of u0 (default) or its discrete L2 projection onto V_h.
NodalField initial_field(const ProblemSpec& spec, MeshPtr mesh,
                         InitialApproximation mode = InitialApproximation::Interpolation);

/// Assembled operators of one problem on one mesh; reused across steps.
class EulerStepper {
 public:
  EulerStepper(const ProblemSpec& spec, MeshPtr mesh);

  /// Solves ((x - field) / tau, chi)_h + a_h(x, chi) = (f(t_from + tau), chi)_h.
  NodalField step(const NodalField& field, double t_from, double tau) const {
    return step_to(field, t_from + tau, tau);
  }
  /// Same with the source evaluated at the given new time level.
  NodalField step_to(const NodalField& field, double t_new, double tau) const;

  const TriDiagonalMatrix& mass() const { return mass_; }
  const TriDiagonalMatrix& stiffness() const { return stiffness_; }
  const MeshPtr& mesh() const { return mesh_; }

 private:
  SpaceTimeFunction source_;
  MeshPtr mesh_;
  TriDiagonalMatrix mass_;
  TriDiagonalMatrix stiffness_;
};

NodalField backward_euler_step(const NodalField& field, double t_from, double tau,
                               const ProblemSpec& spec, MeshPtr mesh);

/// Runs the one-step, the two-half-step and the extrapolated sequences.
Trajectory run(const ProblemSpec& spec, MeshPtr mesh, const TimeGrid& grid,
               InitialApproximation mode = InitialApproximation::Interpolation);
Trajectory run(const ProblemSpec& spec, const TimeGrid& grid, const NodalField& initial);

/// (current - previous) / tau
NodalField delta_t(const NodalField& current, const NodalField& previous, double tau);

}  // namespace eemax
