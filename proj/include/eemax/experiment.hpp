#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eemax/parabolic_estimator.hpp"
#include "eemax/problem.hpp"
#include "eemax/timestepper.hpp"

namespace eemax {

enum class SplitPolicy {
  /// K = M - 1
  Last,
  /// Every K in {0, ..., M-1}; the reported total stays at K = M - 1, the minimiser is recorded.
  Sweep,
};

SplitPolicy parse_split_policy(std::string_view name);
std::string to_string(SplitPolicy policy);

struct RunConfig {
  std::string problem = "paper-sect4";
  /// JSON problem description; takes precedence over `problem` when set.
  std::string problem_file;
  std::vector<std::size_t> m_values = {16, 32, 64, 128, 256};
  SplitPolicy split_policy = SplitPolicy::Last;
  std::string estimator = "residual-1d";
  EtaFMode eta_f_mode = EtaFMode::SimpsonPaper;
  InitialApproximation initial = InitialApproximation::Interpolation;
  double oracle_tol = 1e-9;
  std::size_t samples = kDefaultSamplesPerElement;
  std::size_t workers = 1;
  std::string out_dir;
  std::string cache_dir;
  /// Print efficiency as "1/x" in the text table.
  bool reciprocal_efficiency = false;

  /// Throws std::invalid_argument on an invalid combination.
  void validate() const;
};

/// M values 2^k between m_min and m_max inclusive.
std::vector<std::size_t> powers_of_two(std::size_t m_min, std::size_t m_max);

/// Applies keys of a JSON config object on top of `config`.
void apply_config_json(RunConfig& config, const nlohmann::json& json);

struct RunRecord {
  std::size_t M = 0;
  std::size_t elements = 0;
  double e_M = 0.0;
  std::optional<double> p_M;
  double eta = 0.0;
  std::optional<double> eta_order;
  double chi_M = 0.0;
  // weighted breakdown columns
  double eta_init = 0.0;
  double eta_F = 0.0;
  double eta_ell_MK = 0.0;
  double eta_dpsi = 0.0;
  double eta_zh = 0.0;
  std::size_t K = 0;
  std::optional<std::size_t> best_K;
  std::optional<double> best_eta;
  /// Sum sigma_j kappa0 eta_F^j in the other eta_F mode.
  double eta_F_alternative = 0.0;
  double oracle_accuracy = 0.0;
  double solve_seconds = 0.0;
  double estimate_seconds = 0.0;
  std::string estimator;
  std::string estimator_constants;
  std::string eta_f_mode;
  std::string initial_approximation;
  /// Set when the row could not be computed.
  std::optional<std::string> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Production mesh for a given M: uniform, h = tau = T / M.
SpatialMesh production_mesh(const ProblemSpec& spec, std::size_t M);

ProblemSpec resolve_problem(const RunConfig& config);

std::vector<RunRecord> run_matrix(const RunConfig& config);
std::vector<RunRecord> run_matrix(const RunConfig& config, const ProblemSpec& spec);

struct EmittedFiles {
  std::string table1_csv;
  std::string table2_csv;
  std::string table1_txt;
  std::string table2_txt;
  std::string metadata_json;
};

/// Writes table1.csv (M,e_M,p_M,eta_eE,chi_M), table2.csv
/// (M,eta_init,eta_F,eta_ell_MK,eta_dpsi,eta_zh), aligned text versions and a metadata file.
EmittedFiles emit_tables(const std::vector<RunRecord>& records, const std::string& out_dir,
                         bool reciprocal_efficiency = false);

std::string format_sci(double value);
std::string table1_csv(const std::vector<RunRecord>& records);
std::string table2_csv(const std::vector<RunRecord>& records);
std::string table1_text(const std::vector<RunRecord>& records, bool reciprocal_efficiency);
std::string table2_text(const std::vector<RunRecord>& records);

/// Parses a table1.csv / table2.csv body back into records (only the printed fields).
std::vector<RunRecord> parse_table1_csv(const std::string& text);
std::vector<RunRecord> parse_table2_csv(const std::string& text);

}  // namespace eemax
