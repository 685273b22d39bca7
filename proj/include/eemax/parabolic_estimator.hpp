#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eemax/elliptic_estimator.hpp"
#include "eemax/fem1d.hpp"
#include "eemax/problem.hpp"
#include "eemax/reconstruction.hpp"
#include "eemax/timestepper.hpp"

namespace eemax {

/// Time weights built from the Green's function bounds.
/// sigma_j = exp(-gamma (T - t_j))                              j = 0..M
/// mu_j    = int_{I_j} kappa1 / (T - s) + kappa1' ds            j = 1..M (index 0 unused)
/// chi_j   = min(kappa0 tau_j^2 / 4,
///               int_{I_j} (t_j - s)(s - t_{j-1}) / 2 * (kappa1 / (T - s) + kappa1') ds)
/// mu_M is +inf whenever kappa1 > 0.
struct GreenWeights {
  std::vector<double> sigma;
  std::vector<double> mu;
  std::vector<double> chi;
};

GreenWeights compute_weights(const TimeGrid& grid, const GreensBounds& greens);

/// int_a^b (u - a)(b - u) / (2u) du for 0 <= a < b, evaluated without cancellation.
double bubble_over_distance_integral(double a, double b);

enum class EtaFMode {
  /// (tau_j / 6) |f^j - 2 f^{j-1/2} + f^{j-1}|_inf
  SimpsonPaper,
  /// 5-point Gauss rule in time of s -> |(F - F_hat)(s)|_inf
  Quadrature,
};

EtaFMode parse_eta_f_mode(std::string_view name);
std::string to_string(EtaFMode mode);

struct EstimatorOptions {
  /// Split index; defaults to M - 1.
  std::optional<std::size_t> split;
  EtaFMode eta_f_mode = EtaFMode::SimpsonPaper;
  std::size_t samples = kDefaultSamplesPerElement;
};

struct EstimatorBreakdown {
  double eta_init = 0.0;
  std::vector<double> eta_F;     // j = 1..M stored at index j - 1
  std::vector<double> eta_ell;   // j = 0..M
  std::vector<double> eta_ell_delta;  // j = 1..M stored at index j - 1
  double eta_ell_MK = 0.0;
  std::vector<double> eta_dpsi;  // j = 1..M stored at index j - 1
  std::vector<double> eta_zh;    // j = 1..M stored at index j - 1
  GreenWeights weights;
  std::size_t split = 0;
  double kappa0 = 0.0;

  // Weighted column aggregates; they add up to total.
  double init_term = 0.0;   // kappa0 sigma_0 eta_init
  double F_term = 0.0;      // sum sigma_j kappa0 eta_F^j
  double dpsi_term = 0.0;   // sum sigma_j chi_j eta_dpsi^j
  double zh_term = 0.0;     // sum sigma_j eta_zh^j
  double total = 0.0;

  /// Re-adds every component in fixed index order.
  double recompute_total() const;
};

/// |u0 - u_h^0|_inf by sampling on every element.
double eta_init(const ProblemSpec& spec, const NodalField& initial,
                std::size_t samples = kDefaultSamplesPerElement);

double eta_F(std::size_t j, const ProblemSpec& spec, const TimeGrid& grid, const SpatialMesh& mesh,
             EtaFMode mode = EtaFMode::SimpsonPaper, std::size_t samples = kDefaultSamplesPerElement);

/// kappa0 (eta_ell^M + sigma_K eta_ell^K + sum_{j>K} sigma_j tau_j eta_ell,delta^j)
///   + sum_{j=1}^{K} sigma_j mu_j max(eta_ell^j, eta_ell^{j-1}).
/// per_j_eta_ell is indexed 0..M, per_j_eta_ell_delta 1..M at positions 0..M-1.
double eta_ell_MK(std::size_t split, std::span<const double> per_j_eta_ell,
                  std::span<const double> per_j_eta_ell_delta, const GreenWeights& weights,
                  const GreensBounds& greens, const TimeGrid& grid);

/// min(kappa0 tau_j |psi* - f*|_inf, mu_j (|z*|_inf + eta(z*, psi* - f*))).
double eta_zh(std::size_t j, const StarDefect& star, const GreenWeights& weights,
              const GreensBounds& greens, const EllipticEstimator& estimator, const TimeGrid& grid,
              std::size_t samples = kDefaultSamplesPerElement);

/// |delta_t psi_u^j|_inf
double eta_dpsi(std::size_t j, const PsiFamily& psi, const TimeGrid& grid);

EstimatorBreakdown assemble_total(const ProblemSpec& spec, const TimeGrid& grid,
                                  const Trajectory& traj, const PsiFamily& psi,
                                  std::span<const StarDefect> stars,
                                  const EllipticEstimator& estimator,
                                  const EstimatorOptions& options = {});

/// Convenience: psi family, star defects and breakdown for a finished run.
EstimatorBreakdown estimate(const ProblemSpec& spec, const TimeGrid& grid, const Trajectory& traj,
                            const EllipticEstimator& estimator, const EstimatorOptions& options = {});

}  // namespace eemax
