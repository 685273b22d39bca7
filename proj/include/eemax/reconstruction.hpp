#pragma once

#include <cstddef>
#include <vector>

#include "eemax/fem1d.hpp"
#include "eemax/problem.hpp"
#include "eemax/timestepper.hpp"

namespace eemax {

/// psi for the three solution families, defined through
///   (psi, chi)_h = a_h(phi_h, chi) - (f, chi)_h   for all chi in V_h.
/// psi_w uses the same slot layout as Trajectory::w.
struct PsiFamily {
  std::vector<NodalField> psi_v;
  std::vector<NodalField> psi_w;
  std::vector<NodalField> psi_u;

  const NodalField& psi_w_at(std::size_t j) const { return psi_w[full_slot(j)]; }
  const NodalField& psi_w_half(std::size_t j) const { return psi_w[half_slot(j)]; }
};

/// Defect of the extrapolation on I_j:
///   z*  = w^{j-1/2} - w^{j-1} - (v^j - v^{j-1}) / 2,
///   psi* = same combination of psi_w, psi_v,
///   f*  = (f^j - 2 f^{j-1/2} + f^{j-1}) / 2.
struct StarDefect {
  NodalField z_star;
  NodalField psi_star;
  SpaceFunction f_star;

  /// psi* - f* as an element-wise function.
  ElementFunction psi_minus_f() const;
};

/// Reuses the mass and stiffness matrices of one problem on one mesh.
class Reconstructor {
 public:
  Reconstructor(const ProblemSpec& spec, MeshPtr mesh);

  NodalField psi(const NodalField& phi, double t_eval) const;

 private:
  SpaceTimeFunction source_;
  MeshPtr mesh_;
  TriDiagonalMatrix mass_;
  TriDiagonalMatrix stiffness_;
};

NodalField compute_psi(const NodalField& phi, double t_eval, const ProblemSpec& spec);

PsiFamily compute_psi_family(const Trajectory& traj, const TimeGrid& grid, const ProblemSpec& spec);

StarDefect compute_star_defect(const Trajectory& traj, const PsiFamily& psi, const TimeGrid& grid,
                               const ProblemSpec& spec, std::size_t j);

std::vector<StarDefect> compute_star_defects(const Trajectory& traj, const PsiFamily& psi,
                                             const TimeGrid& grid, const ProblemSpec& spec);

}  // namespace eemax
