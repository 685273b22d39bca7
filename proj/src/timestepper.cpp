#include "eemax/timestepper.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eemax {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw std::invalid_argument("time grid needs at least one step");
  if (times_.front() != 0.0) throw std::invalid_argument("time grid must start at t = 0");
  for (std::size_t j = 1; j < times_.size(); ++j) {
    if (!(times_[j] > times_[j - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing (index " +
                                  std::to_string(j) + ")");
    }
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (steps == 0 || !(horizon > 0.0)) throw std::invalid_argument("invalid uniform time grid");
  std::vector<double> t(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) {
    t[j] = horizon * static_cast<double>(j) / static_cast<double>(steps);
  }
  t.back() = horizon;
  return TimeGrid(std::move(t));
}

NodalField initial_field(const ProblemSpec& spec, MeshPtr mesh, InitialApproximation mode) {
  if (mode == InitialApproximation::Interpolation) {
    auto f = NodalField::interpolate(mesh, spec.initial);
    f.values.front() = 0.0;
    f.values.back() = 0.0;
    return f;
  }
  const auto m = assemble_mass(*mesh);
  const auto b = assemble_load(*mesh, spec.initial);
  return from_interior(mesh, solve_tridiagonal(m, b));
}

EulerStepper::EulerStepper(const ProblemSpec& spec, MeshPtr mesh)
    : source_(spec.source),
      mesh_(std::move(mesh)),
      mass_(assemble_mass(*mesh_)),
      stiffness_(assemble_stiffness(*mesh_, spec.diffusion, spec.reaction)) {}

NodalField EulerStepper::step_to(const NodalField& field, double t_new, double tau) const {
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be positive");
  const auto system = mass_.plus_scaled(tau, stiffness_);
  if (!system.strictly_diagonally_dominant()) {
    throw std::runtime_error("backward Euler system is not diagonally dominant");
  }
  auto rhs = mass_.apply(interior_values(field));
  const auto load = assemble_load(*mesh_, [&](double x) { return source_(x, t_new); });
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += tau * load[i];
  return from_interior(mesh_, solve_tridiagonal(system, rhs));
}

NodalField backward_euler_step(const NodalField& field, double t_from, double tau,
                               const ProblemSpec& spec, MeshPtr mesh) {
  return EulerStepper(spec, std::move(mesh)).step(field, t_from, tau);
}

Trajectory run(const ProblemSpec& spec, const TimeGrid& grid, const NodalField& initial) {
  const EulerStepper stepper(spec, initial.mesh);
  const std::size_t m = grid.steps();
  Trajectory traj;
  traj.v.reserve(m + 1);
  traj.w.reserve(2 * m + 1);
  traj.u.reserve(m + 1);
  traj.v.push_back(initial);
  traj.w.push_back(initial);
  traj.u.push_back(initial);
  for (std::size_t j = 1; j <= m; ++j) {
    const double tau = grid.step(j);
    try {
      traj.v.push_back(stepper.step_to(traj.v.back(), grid.time(j), tau));
      traj.w.push_back(stepper.step_to(traj.w.back(), grid.midpoint(j), 0.5 * tau));
      traj.w.push_back(stepper.step_to(traj.w.back(), grid.time(j), 0.5 * tau));
    } catch (const std::exception& e) {
      throw std::runtime_error("time step " + std::to_string(j) + ": " + e.what());
    }
    NodalField u = traj.w.back();
    u *= 2.0;
    u -= traj.v.back();
    traj.u.push_back(std::move(u));
  }
  return traj;
}

Trajectory run(const ProblemSpec& spec, MeshPtr mesh, const TimeGrid& grid,
               InitialApproximation mode) {
  return run(spec, grid, initial_field(spec, std::move(mesh), mode));
}

NodalField delta_t(const NodalField& current, const NodalField& previous, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be positive");
  NodalField d = current;
  d -= previous;
  d *= 1.0 / tau;
  return d;
}

}  // namespace eemax
