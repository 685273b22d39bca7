#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eemax/experiment.hpp"

namespace eemax::checks {

enum class Status { Pass, Flagged, Fail };

std::string to_string(Status status);

struct CheckResult {
  int criterion = 0;
  std::string title;
  Status status = Status::Fail;
  std::vector<std::string> details;

  bool failed() const { return status == Status::Fail; }
};

/// One line: "[PASS] 3 reliability: ..." followed by indented details when verbose.
std::string format(const CheckResult& result, bool verbose = false);

/// Reference values of e_M for M = 16, 32, 64, 128, 256 on the built-in test problem.
inline constexpr double kPublishedErrors[] = {3.872e-4, 1.039e-4, 2.703e-5, 6.908e-6, 1.742e-6};

struct Tolerances {
  double identity = 1e-10;
  double weight_relative = 1e-10;
  double order = 2.0;
  double order_band = 0.1;
  /// Orders are checked from this M on.
  std::size_t order_from_m = 64;
  double magnitude_band = 0.10;
  double magnitude_flag_factor = 2.0;
  double efficiency_low = 1.0 / 2000.0;
  double efficiency_high = 1.0 / 500.0;
  double dominance_share = 0.70;
  double elliptic_max_ratio = 100.0;
  double runtime_seconds = 120.0;
};

/// psi_v = -delta_t v, both half-step identities for w, psi_u = 2 psi_w - psi_v, u = 2w - v
/// and a_h(z*, chi) = (psi* - f*, chi)_h over three problems and three meshes.
CheckResult identity_suite(const Tolerances& tol = {});

/// Closed-form sigma, mu, chi against adaptive Gauss-Kronrod on random non-uniform grids.
CheckResult weight_oracle(std::uint64_t seed = 20240611, std::size_t grids = 20,
                          const Tolerances& tol = {});

/// Manufactured elliptic solutions on 8..512 elements: eta >= error and eta / error <= 100.
CheckResult elliptic_family(const Tolerances& tol = {});

/// Manufactured parabolic solution: EOC of e_M and eta >= e_M on every row.
CheckResult manufactured_parabolic(const RunConfig& base, const Tolerances& tol = {});

/// Criteria 1-5 from the records of the built-in problem and the wall time of the run.
std::vector<CheckResult> matrix_criteria(const std::vector<RunRecord>& records, double seconds,
                                         const Tolerances& tol = {});

struct SuiteOptions {
  std::string cache_dir;
  std::size_t workers = 1;
};

/// All nine criteria, ordered by number.
std::vector<CheckResult> acceptance_suite(const SuiteOptions& options = {}, const Tolerances& tol = {});

/// Criteria whose failure means an estimate is not a bound or a building block is wrong.
bool is_reliability_criterion(int criterion);

}  // namespace eemax::checks
