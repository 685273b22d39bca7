#include "eemax/elliptic_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eemax {

ResidualEstimator1D::ResidualEstimator1D(double diffusion, SpaceFunction reaction,
                                         std::size_t samples)
    : diffusion_(diffusion), reaction_(std::move(reaction)), samples_(samples) {
  if (!(diffusion_ > 0.0)) throw std::invalid_argument("diffusion must be positive");
}

std::string ResidualEstimator1D::constants() const {
  std::ostringstream s;
  s << "C=1/(8*eps), eps=" << diffusion_ << ", samples_per_element=" << samples_
    << ", quadrature_terms=neglected";
  return s.str();
}

double ResidualEstimator1D::evaluate(const NodalField& y_h, const ElementFunction& g) const {
  const SpatialMesh& mesh = *y_h.mesh;
  const double n = static_cast<double>(std::max<std::size_t>(samples_, 2) - 1);
  double eta = 0.0;
  for (std::size_t e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.width(e);
    const double xl = mesh.node(e);
    double residual = 0.0;
    for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) {
      const double s = static_cast<double>(k) / n;
      const double x = xl + s * h;
      residual = std::max(residual, std::abs(g(e, x, s) - reaction_(x) * y_h.at_local(e, s)));
    }
    eta = std::max(eta, h * h * residual);
  }
  return eta / (8.0 * diffusion_);
}

std::vector<std::string> estimator_names() { return {"residual-1d"}; }

std::unique_ptr<EllipticEstimator> make_estimator(std::string_view name, const ProblemSpec& spec,
                                                  std::size_t samples) {
  if (name == "residual-1d") {
    return std::make_unique<ResidualEstimator1D>(spec.diffusion, spec.reaction, samples);
  }
  throw std::invalid_argument("unknown elliptic estimator '" + std::string(name) + "'");
}

double default_estimator_eval(const NodalField& y_h, const ElementFunction& g,
                              const ProblemSpec& spec, std::size_t samples) {
  return ResidualEstimator1D(spec.diffusion, spec.reaction, samples).evaluate(y_h, g);
}

double eta_ell(std::size_t j, const Trajectory& traj, const PsiFamily& psi,
               const EllipticEstimator& estimator, const ProblemSpec& spec, const TimeGrid& grid) {
  if (j > traj.steps()) throw std::out_of_range("eta_ell index out of range");
  const double t = grid.time(j);
  const NodalField& p = psi.psi_u[j];
  return estimator.evaluate(traj.u[j], [&](std::size_t e, double x, double s) {
    return spec.source(x, t) + p.at_local(e, s);
  });
}

double eta_ell_delta(std::size_t j, const Trajectory& traj, const PsiFamily& psi,
                     const EllipticEstimator& estimator, const ProblemSpec& spec,
                     const TimeGrid& grid) {
  if (j < 1 || j > traj.steps()) throw std::out_of_range("eta_ell_delta index out of range");
  const double tau = grid.step(j);
  const double t1 = grid.time(j);
  const double t0 = grid.time(j - 1);
  const NodalField du = delta_t(traj.u[j], traj.u[j - 1], tau);
  const NodalField dpsi = delta_t(psi.psi_u[j], psi.psi_u[j - 1], tau);
  return estimator.evaluate(du, [&](std::size_t e, double x, double s) {
    return (spec.source(x, t1) - spec.source(x, t0)) / tau + dpsi.at_local(e, s);
  });
}

}  // namespace eemax
