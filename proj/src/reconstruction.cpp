#include "eemax/reconstruction.hpp"

#include <stdexcept>
#include <string>

namespace eemax {

ElementFunction StarDefect::psi_minus_f() const {
  return [psi = psi_star, f = f_star](std::size_t e, double x, double s) {
    return psi.at_local(e, s) - f(x);
  };
}

Reconstructor::Reconstructor(const ProblemSpec& spec, MeshPtr mesh)
    : source_(spec.source),
      mesh_(std::move(mesh)),
      mass_(assemble_mass(*mesh_)),
      stiffness_(assemble_stiffness(*mesh_, spec.diffusion, spec.reaction)) {}

NodalField Reconstructor::psi(const NodalField& phi, double t_eval) const {
  auto rhs = stiffness_.apply(interior_values(phi));
  const auto load = assemble_load(*mesh_, [&](double x) { return source_(x, t_eval); });
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= load[i];
  return from_interior(mesh_, solve_tridiagonal(mass_, rhs));
}

NodalField compute_psi(const NodalField& phi, double t_eval, const ProblemSpec& spec) {
  return Reconstructor(spec, phi.mesh).psi(phi, t_eval);
}

PsiFamily compute_psi_family(const Trajectory& traj, const TimeGrid& grid, const ProblemSpec& spec) {
  const std::size_t m = traj.steps();
  if (grid.steps() != m) throw std::invalid_argument("trajectory and time grid disagree");
  const Reconstructor rec(spec, traj.v.front().mesh);
  PsiFamily out;
  out.psi_v.reserve(m + 1);
  out.psi_w.reserve(2 * m + 1);
  out.psi_u.reserve(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    out.psi_v.push_back(rec.psi(traj.v[j], grid.time(j)));
    if (j > 0) out.psi_w.push_back(rec.psi(traj.w_half(j), grid.midpoint(j)));
    out.psi_w.push_back(rec.psi(traj.w_at(j), grid.time(j)));
    out.psi_u.push_back(rec.psi(traj.u[j], grid.time(j)));
  }
  return out;
}

StarDefect compute_star_defect(const Trajectory& traj, const PsiFamily& psi, const TimeGrid& grid,
                               const ProblemSpec& spec, std::size_t j) {
  if (j < 1 || j > traj.steps()) {
    throw std::out_of_range("star defect index " + std::to_string(j) + " out of range");
  }
  auto combine = [](const NodalField& half, const NodalField& prev_full, const NodalField& cur,
                    const NodalField& prev) {
    NodalField z = half;
    z -= prev_full;
    NodalField d = cur;
    d -= prev;
    d *= 0.5;
    z -= d;
    return z;
  };
  StarDefect out{
      combine(traj.w_half(j), traj.w_at(j - 1), traj.v[j], traj.v[j - 1]),
      combine(psi.psi_w_half(j), psi.psi_w_at(j - 1), psi.psi_v[j], psi.psi_v[j - 1]),
      {},
  };
  const double t0 = grid.time(j - 1);
  const double tm = grid.midpoint(j);
  const double t1 = grid.time(j);
  out.f_star = [f = spec.source, t0, tm, t1](double x) {
    return 0.5 * (f(x, t1) - 2.0 * f(x, tm) + f(x, t0));
  };
  return out;
}

std::vector<StarDefect> compute_star_defects(const Trajectory& traj, const PsiFamily& psi,
                                             const TimeGrid& grid, const ProblemSpec& spec) {
  std::vector<StarDefect> out;
  out.reserve(traj.steps());
  for (std::size_t j = 1; j <= traj.steps(); ++j) {
    out.push_back(compute_star_defect(traj, psi, grid, spec, j));
  }
  return out;
}

}  // namespace eemax
