#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eemax/checks.hpp"
#include "eemax/elliptic_estimator.hpp"
#include "eemax/experiment.hpp"

namespace {

std::string env_cache_dir() {
  const char* dir = std::getenv("EEMAX_CACHE_DIR");
  return dir ? dir : "";
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return nlohmann::json::parse(in);
}

int do_run(eemax::RunConfig config, const std::string& config_path) {
  if (!config_path.empty()) eemax::apply_config_json(config, read_json(config_path));
  if (config.out_dir.empty()) throw std::invalid_argument("--out is required");
  const auto records = eemax::run_matrix(config);
  const auto files = eemax::emit_tables(records, config.out_dir, config.reciprocal_efficiency);

  std::cout << eemax::table1_text(records, config.reciprocal_efficiency) << '\n'
            << eemax::table2_text(records) << '\n';
  std::cout << "wrote " << files.table1_csv << ", " << files.table2_csv << ", " << files.metadata_json << '\n';
  int status = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      std::cerr << "M=" << r.M << " failed: " << *r.failure << '\n';
      status = 2;
    } else if (r.eta < r.e_M) {
      std::cerr << "M=" << r.M << ": estimator below the error\n";
      status = 3;
    }
  }
  return status;
}

int do_verify(const std::string& cache_dir, std::size_t workers, bool strict, bool verbose) {
  eemax::checks::SuiteOptions options;
  options.cache_dir = cache_dir;
  options.workers = workers;
  const auto results = eemax::checks::acceptance_suite(options);
  bool reliable = true;
  bool all = true;
  for (const auto& r : results) {
    std::cout << eemax::checks::format(r, verbose) << '\n';
    if (r.failed()) {
      all = false;
      if (eemax::checks::is_reliability_criterion(r.criterion)) reliable = false;
    }
  }
  std::cout << (reliable ? "reliability checks passed" : "reliability checks FAILED") << '\n';
  if (!reliable) return 1;
  return strict && !all ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A posteriori maximum-norm error estimation for extrapolated Euler time stepping"};
  app.require_subcommand(1);

  eemax::RunConfig config;
  config.cache_dir = env_cache_dir();
  std::size_t m_min = 16;
  std::size_t m_max = 256;
  std::string k_policy = "last";
  std::string eta_f_mode = "simpson-paper";
  std::string initial = "interpolation";
  std::string config_path;

  auto* run = app.add_subcommand("run", "Run the experiment matrix and write the tables");
  run->add_option("--problem", config.problem, "Built-in problem name")
      ->check(CLI::IsMember(eemax::builtin_problem_names()));
  run->add_option("--problem-file", config.problem_file, "JSON problem description")->check(CLI::ExistingFile);
  run->add_option("--m-min", m_min, "Smallest M (power of two)");
  run->add_option("--m-max", m_max, "Largest M (power of two)");
  run->add_option("--k-policy", k_policy, "Split index policy")->check(CLI::IsMember({"last", "sweep"}));
  run->add_option("--eta-f-mode", eta_f_mode, "Source term evaluation")
      ->check(CLI::IsMember({"simpson-paper", "quadrature"}));
  run->add_option("--estimator", config.estimator, "Elliptic estimator")
      ->check(CLI::IsMember(eemax::estimator_names()));
  run->add_option("--initial", initial, "Initial approximation")
      ->check(CLI::IsMember({"interpolation", "l2-projection"}));
  run->add_option("--oracle-tol", config.oracle_tol, "Reference solution tolerance");
  run->add_option("--samples", config.samples, "Sup-norm samples per element");
  run->add_option("--workers", config.workers, "Rows computed in parallel");
  run->add_option("--out", config.out_dir, "Output directory");
  run->add_option("--cache-dir", config.cache_dir, "Reference cache directory (default $EEMAX_CACHE_DIR)");
  run->add_flag("--reciprocal-efficiency", config.reciprocal_efficiency, "Print efficiency as 1/x");
  run->add_option("--config", config_path, "JSON config; its keys override the flags")->check(CLI::ExistingFile);

  bool strict = false;
  bool verbose = false;
  auto* verify = app.add_subcommand("verify", "Run the property suites; exit 0 when all reliability checks pass");
  verify->add_option("--cache-dir", config.cache_dir, "Reference cache directory (default $EEMAX_CACHE_DIR)");
  verify->add_option("--workers", config.workers, "Rows computed in parallel");
  verify->add_flag("--strict", strict, "Fail on any failed criterion");
  verify->add_flag("-v,--verbose", verbose, "Print details of every check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      config.m_values = eemax::powers_of_two(m_min, m_max);
      config.split_policy = eemax::parse_split_policy(k_policy);
      config.eta_f_mode = eemax::parse_eta_f_mode(eta_f_mode);
      config.initial = initial == "interpolation" ? eemax::InitialApproximation::Interpolation
                                                  : eemax::InitialApproximation::L2Projection;
      return do_run(config, config_path);
    }
    return do_verify(config.cache_dir, config.workers, strict, verbose);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
