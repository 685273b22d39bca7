#include "eemax/parabolic_estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eemax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double bubble_over_distance_integral(double a, double b) {
  if (!(a >= 0.0) || !(b > a)) throw std::invalid_argument("need 0 <= a < b");
  if (a == 0.0) return 0.25 * b * b;
  const double d = b - a;
  const double c = 0.5 * (a + b);
  const double ratio = d / (2.0 * c);
  const double q = ratio * ratio;
  if (q < 0.25) {
    // expansion of 1 / (c + z) about the interval midpoint; only even powers survive
    const double lead = 2.0 * (0.125 * d * d * d) / c;
    double sum = 0.0;
    double qm = 1.0;
    for (int m = 0; m < 200; ++m) {
      const double term = lead * qm / ((2.0 * m + 1.0) * (2.0 * m + 3.0));
      sum += term;
      if (term <= 1e-18 * sum) break;
      qm *= q;
    }
    return sum;
  }
  return 0.5 * (0.5 * (b * b - a * a) - a * b * std::log(b / a));
}

GreenWeights compute_weights(const TimeGrid& grid, const GreensBounds& greens) {
  const std::size_t m = grid.steps();
  const double horizon = grid.horizon();
  GreenWeights w;
  w.sigma.resize(m + 1);
  w.mu.assign(m + 1, 0.0);
  w.chi.assign(m + 1, 0.0);
  for (std::size_t j = 0; j <= m; ++j) {
    w.sigma[j] = std::exp(-greens.gamma() * (horizon - grid.time(j)));
  }
  w.sigma[m] = 1.0;
  for (std::size_t j = 1; j <= m; ++j) {
    const double tau = grid.step(j);
    const double a = j == m ? 0.0 : horizon - grid.time(j);
    const double b = horizon - grid.time(j - 1);
    if (a == 0.0) {
      w.mu[j] = greens.kappa1() > 0.0 ? kInf : greens.kappa1_prime() * tau;
    } else {
      w.mu[j] = greens.kappa1() * std::log1p((b - a) / a) + greens.kappa1_prime() * tau;
    }
    const double bubble = (greens.kappa1() > 0.0 ? greens.kappa1() * bubble_over_distance_integral(a, b)
                                                 : 0.0) +
                          greens.kappa1_prime() * tau * tau * tau / 12.0;
    w.chi[j] = std::min(greens.kappa0() * tau * tau / 4.0, bubble);
  }
  return w;
}

EtaFMode parse_eta_f_mode(std::string_view name) {
  if (name == "simpson-paper") return EtaFMode::SimpsonPaper;
  if (name == "quadrature") return EtaFMode::Quadrature;
  throw std::invalid_argument("unknown eta_F mode '" + std::string(name) + "'");
}

std::string to_string(EtaFMode mode) {
  return mode == EtaFMode::SimpsonPaper ? "simpson-paper" : "quadrature";
}

double EstimatorBreakdown::recompute_total() const {
  double sum = kappa0 * weights.sigma[0] * eta_init;
  for (std::size_t j = 1; j < weights.sigma.size(); ++j) {
    sum += weights.sigma[j] *
           (kappa0 * eta_F[j - 1] + weights.chi[j] * eta_dpsi[j - 1] + eta_zh[j - 1]);
  }
  return sum + eta_ell_MK;
}

double eta_init(const ProblemSpec& spec, const NodalField& initial, std::size_t samples) {
  return sup_norm(
      *initial.mesh,
      [&](std::size_t e, double x, double s) { return spec.initial(x) - initial.at_local(e, s); },
      samples);
}

double eta_F(std::size_t j, const ProblemSpec& spec, const TimeGrid& grid, const SpatialMesh& mesh,
             EtaFMode mode, std::size_t samples) {
  if (j < 1 || j > grid.steps()) throw std::out_of_range("eta_F index out of range");
  const double t0 = grid.time(j - 1);
  const double t1 = grid.time(j);
  const double tau = grid.step(j);
  const auto& f = spec.source;
  if (mode == EtaFMode::SimpsonPaper) {
    const double tm = grid.midpoint(j);
    const double second_difference = sup_norm(
        mesh, [&](std::size_t, double x, double) { return f(x, t1) - 2.0 * f(x, tm) + f(x, t0); },
        samples);
    return tau / 6.0 * second_difference;
  }
  // F - F_hat = f - (linear interpolant of f between t_{j-1} and t_j); the shift by
  // f^{j-1/2} cancels.
  static constexpr std::array<double, 5> nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                  0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665,
                                                    0.5688888888888889, 0.4786286704993665,
                                                    0.2369268850561891};
  double integral = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double s = t0 + 0.5 * tau * (nodes[q] + 1.0);
    const double l0 = (t1 - s) / tau;
    const double l1 = (s - t0) / tau;
    const double defect = sup_norm(
        mesh,
        [&](std::size_t, double x, double) { return f(x, s) - l0 * f(x, t0) - l1 * f(x, t1); },
        samples);
    integral += weights[q] * defect;
  }
  return 0.5 * tau * integral;
}

double eta_ell_MK(std::size_t split, std::span<const double> per_j_eta_ell,
                  std::span<const double> per_j_eta_ell_delta, const GreenWeights& weights,
                  const GreensBounds& greens, const TimeGrid& grid) {
  const std::size_t m = grid.steps();
  if (split >= m) {
    throw std::invalid_argument("split index K = " + std::to_string(split) +
                                " outside {0, ..., M-1}");
  }
  if (per_j_eta_ell.size() != m + 1 || per_j_eta_ell_delta.size() != m) {
    throw std::invalid_argument("elliptic estimator sequences have wrong length");
  }
  double direct = per_j_eta_ell[m] + weights.sigma[split] * per_j_eta_ell[split];
  for (std::size_t j = split + 1; j <= m; ++j) {
    direct += weights.sigma[j] * grid.step(j) * per_j_eta_ell_delta[j - 1];
  }
  double history = 0.0;
  for (std::size_t j = 1; j <= split; ++j) {
    history += weights.sigma[j] * weights.mu[j] * std::max(per_j_eta_ell[j], per_j_eta_ell[j - 1]);
  }
  return greens.kappa0() * direct + history;
}

double eta_zh(std::size_t j, const StarDefect& star, const GreenWeights& weights,
              const GreensBounds& greens, const EllipticEstimator& estimator, const TimeGrid& grid,
              std::size_t samples) {
  if (j < 1 || j > grid.steps()) throw std::out_of_range("eta_zh index out of range");
  const auto residual = star.psi_minus_f();
  const double direct =
      greens.kappa0() * grid.step(j) * sup_norm(*star.z_star.mesh, residual, samples);
  const double mu = weights.mu[j];
  if (!std::isfinite(mu)) return direct;
  const double via_reconstruction = mu * (sup_norm(star.z_star) + estimator.evaluate(star.z_star, residual));
  return std::min(direct, via_reconstruction);
}

double eta_dpsi(std::size_t j, const PsiFamily& psi, const TimeGrid& grid) {
  if (j < 1 || j > grid.steps()) throw std::out_of_range("eta_dpsi index out of range");
  return sup_norm(delta_t(psi.psi_u[j], psi.psi_u[j - 1], grid.step(j)));
}

EstimatorBreakdown assemble_total(const ProblemSpec& spec, const TimeGrid& grid,
                                  const Trajectory& traj, const PsiFamily& psi,
                                  std::span<const StarDefect> stars,
                                  const EllipticEstimator& estimator,
                                  const EstimatorOptions& options) {
  const std::size_t m = grid.steps();
  if (traj.steps() != m || psi.psi_u.size() != m + 1 || psi.psi_w.size() != 2 * m + 1 ||
      stars.size() != m) {
    throw std::invalid_argument("estimator inputs come from inconsistent runs");
  }
  const std::size_t split = options.split.value_or(m - 1);
  const auto& greens = spec.greens;
  const SpatialMesh& mesh = *traj.u.front().mesh;

  EstimatorBreakdown out;
  out.kappa0 = greens.kappa0();
  out.split = split;
  out.weights = compute_weights(grid, greens);
  const auto& w = out.weights;

  out.eta_init = eta_init(spec, traj.u.front(), options.samples);
  out.eta_ell.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) out.eta_ell[j] = eta_ell(j, traj, psi, estimator, spec, grid);
  out.eta_F.resize(m);
  out.eta_ell_delta.resize(m);
  out.eta_dpsi.resize(m);
  out.eta_zh.resize(m);
  for (std::size_t j = 1; j <= m; ++j) {
    out.eta_F[j - 1] = eta_F(j, spec, grid, mesh, options.eta_f_mode, options.samples);
    out.eta_ell_delta[j - 1] = eta_ell_delta(j, traj, psi, estimator, spec, grid);
    out.eta_dpsi[j - 1] = eta_dpsi(j, psi, grid);
    out.eta_zh[j - 1] = eta_zh(j, stars[j - 1], w, greens, estimator, grid, options.samples);
  }
  out.eta_ell_MK = eta_ell_MK(split, out.eta_ell, out.eta_ell_delta, w, greens, grid);

  out.init_term = greens.kappa0() * w.sigma[0] * out.eta_init;
  for (std::size_t j = 1; j <= m; ++j) {
    out.F_term += w.sigma[j] * greens.kappa0() * out.eta_F[j - 1];
    out.dpsi_term += w.sigma[j] * w.chi[j] * out.eta_dpsi[j - 1];
    out.zh_term += w.sigma[j] * out.eta_zh[j - 1];
  }
  out.total = out.recompute_total();
  if (!std::isfinite(out.total)) throw std::runtime_error("estimator total is not finite");
  return out;
}

EstimatorBreakdown estimate(const ProblemSpec& spec, const TimeGrid& grid, const Trajectory& traj,
                            const EllipticEstimator& estimator, const EstimatorOptions& options) {
  const auto psi = compute_psi_family(traj, grid, spec);
  const auto stars = compute_star_defects(traj, psi, grid, spec);
  return assemble_total(spec, grid, traj, psi, stars, estimator, options);
}

}  // namespace eemax
