#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "eemax/fem1d.hpp"
#include "eemax/problem.hpp"
#include "eemax/reconstruction.hpp"
#include "eemax/timestepper.hpp"

namespace eemax {

/// Bound eta(y_h, g) >= |y_h - y|_inf where a(y, chi) = (g, chi) and
/// y_h is (or is treated as) the Galerkin solution of a_h(y_h, chi) = (g, chi)_h.
class EllipticEstimator {
 public:
  virtual ~EllipticEstimator() = default;
  virtual std::string name() const = 0;
  /// Human-readable list of the constants the bound relies on.
  virtual std::string constants() const = 0;
  virtual double evaluate(const NodalField& y_h, const ElementFunction& g) const = 0;
};

/// Element residual bound for -eps y'' + r y = g in 1D:
///   eta = max_i h_i^2 / (8 eps) * sup_{element i} |g - r y_h|.
/// y_h'' vanishes on every element, so g - r y_h is the whole element residual;
/// 1/8 is the sup of the element Green's kernel of -d^2/dx^2 scaled by h^2.
/// Quadrature perturbations of a_h are not included.
class ResidualEstimator1D final : public EllipticEstimator {
 public:
  ResidualEstimator1D(double diffusion, SpaceFunction reaction,
                      std::size_t samples = kDefaultSamplesPerElement);

  std::string name() const override { return "residual-1d"; }
  std::string constants() const override;
  double evaluate(const NodalField& y_h, const ElementFunction& g) const override;

 private:
  double diffusion_;
  SpaceFunction reaction_;
  std::size_t samples_;
};

std::vector<std::string> estimator_names();
std::unique_ptr<EllipticEstimator> make_estimator(std::string_view name, const ProblemSpec& spec,
                                                  std::size_t samples = kDefaultSamplesPerElement);

double default_estimator_eval(const NodalField& y_h, const ElementFunction& g,
                              const ProblemSpec& spec,
                              std::size_t samples = kDefaultSamplesPerElement);

/// eta_ell^j = eta(u_h^j, f^j + psi_u^j), j = 0..M.
double eta_ell(std::size_t j, const Trajectory& traj, const PsiFamily& psi,
               const EllipticEstimator& estimator, const ProblemSpec& spec, const TimeGrid& grid);

/// eta_ell,delta^j = eta(delta_t u_h^j, delta_t (f + psi_u)^j), j = 1..M.
double eta_ell_delta(std::size_t j, const Trajectory& traj, const PsiFamily& psi,
                     const EllipticEstimator& estimator, const ProblemSpec& spec,
                     const TimeGrid& grid);

}  // namespace eemax
