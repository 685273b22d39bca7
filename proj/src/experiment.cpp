#include "eemax/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "eemax/elliptic_estimator.hpp"
#include "eemax/reference_oracle.hpp"

namespace eemax {

SplitPolicy parse_split_policy(std::string_view name) {
  if (name == "last") return SplitPolicy::Last;
  if (name == "sweep") return SplitPolicy::Sweep;
  throw std::invalid_argument("unknown K policy '" + std::string(name) + "'");
}

std::string to_string(SplitPolicy policy) { return policy == SplitPolicy::Last ? "last" : "sweep"; }

void RunConfig::validate() const {
  if (m_values.empty()) throw std::invalid_argument("no M values given");
  for (std::size_t m : m_values) {
    if (m < 2) throw std::invalid_argument("M values must be at least 2");
  }
  if (!std::is_sorted(m_values.begin(), m_values.end()) ||
      std::adjacent_find(m_values.begin(), m_values.end()) != m_values.end()) {
    throw std::invalid_argument("M values must be strictly increasing");
  }
  if (!(oracle_tol >= 1e-11)) throw std::invalid_argument("oracle tolerance must be >= 1e-11");
  if (samples < 2) throw std::invalid_argument("need at least two samples per element");
  if (workers == 0) throw std::invalid_argument("worker cap must be positive");
  const auto names = estimator_names();
  if (std::find(names.begin(), names.end(), estimator) == names.end()) {
    throw std::invalid_argument("unknown elliptic estimator '" + estimator + "'");
  }
}

std::vector<std::size_t> powers_of_two(std::size_t m_min, std::size_t m_max) {
  std::vector<std::size_t> out;
  for (std::size_t m = 1; m <= m_max; m *= 2) {
    if (m >= m_min) out.push_back(m);
  }
  return out;
}

void apply_config_json(RunConfig& config, const nlohmann::json& json) {
  if (json.contains("problem")) config.problem = json.at("problem").get<std::string>();
  if (json.contains("problem_file")) config.problem_file = json.at("problem_file").get<std::string>();
  if (json.contains("m_values")) {
    config.m_values = json.at("m_values").get<std::vector<std::size_t>>();
  } else if (json.contains("m_min") || json.contains("m_max")) {
    const auto m_min = json.value("m_min", std::size_t{16});
    const auto m_max = json.value("m_max", std::size_t{256});
    config.m_values = powers_of_two(m_min, m_max);
  }
  if (json.contains("k_policy")) config.split_policy = parse_split_policy(json.at("k_policy").get<std::string>());
  if (json.contains("estimator")) config.estimator = json.at("estimator").get<std::string>();
  if (json.contains("eta_f_mode")) config.eta_f_mode = parse_eta_f_mode(json.at("eta_f_mode").get<std::string>());
  if (json.contains("initial")) {
    const auto name = json.at("initial").get<std::string>();
    if (name == "interpolation") {
      config.initial = InitialApproximation::Interpolation;
    } else if (name == "l2-projection") {
      config.initial = InitialApproximation::L2Projection;
    } else {
      throw std::invalid_argument("unknown initial approximation '" + name + "'");
    }
  }
  if (json.contains("oracle_tol")) config.oracle_tol = json.at("oracle_tol").get<double>();
  if (json.contains("samples")) config.samples = json.at("samples").get<std::size_t>();
  if (json.contains("workers")) config.workers = json.at("workers").get<std::size_t>();
  if (json.contains("out")) config.out_dir = json.at("out").get<std::string>();
  if (json.contains("cache_dir")) config.cache_dir = json.at("cache_dir").get<std::string>();
  if (json.contains("reciprocal_efficiency")) {
    config.reciprocal_efficiency = json.at("reciprocal_efficiency").get<bool>();
  }
}

SpatialMesh production_mesh(const ProblemSpec& spec, std::size_t M) {
  const double exact = spec.length() * static_cast<double>(M) / spec.horizon;
  const auto elements = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  return SpatialMesh::uniform(spec.x_left, spec.x_right, std::max<std::size_t>(elements, 2));
}

ProblemSpec resolve_problem(const RunConfig& config) {
  if (!config.problem_file.empty()) return load_problem(config.problem_file);
  return builtin_problem(config.problem);
}

namespace {

std::string initial_name(InitialApproximation mode) {
  return mode == InitialApproximation::Interpolation ? "interpolation" : "l2-projection";
}

RunRecord run_row(const RunConfig& config, const ProblemSpec& spec, std::size_t M,
                  const ReferenceSolution& reference) {
  using clock = std::chrono::steady_clock;
  RunRecord rec;
  rec.M = M;
  rec.estimator = config.estimator;
  rec.eta_f_mode = to_string(config.eta_f_mode);
  rec.initial_approximation = initial_name(config.initial);
  rec.oracle_accuracy = reference.accuracy;

  const auto mesh = std::make_shared<const SpatialMesh>(production_mesh(spec, M));
  rec.elements = mesh->elements();
  const auto grid = TimeGrid::uniform(spec.horizon, M);

  const auto t0 = clock::now();
  const auto traj = run(spec, mesh, grid, config.initial);
  const auto t1 = clock::now();

  const auto estimator = make_estimator(config.estimator, spec, config.samples);
  rec.estimator_constants = estimator->constants();
  EstimatorOptions options;
  options.eta_f_mode = config.eta_f_mode;
  options.samples = config.samples;
  const auto psi = compute_psi_family(traj, grid, spec);
  const auto stars = compute_star_defects(traj, psi, grid, spec);
  const auto b = assemble_total(spec, grid, traj, psi, stars, *estimator, options);
  const auto t2 = clock::now();

  rec.e_M = error_at_T(traj.u.back(), reference);
  rec.eta = b.total;
  rec.chi_M = rec.e_M > 0.0 ? rec.eta / rec.e_M : 0.0;
  rec.eta_init = b.init_term;
  rec.eta_F = b.F_term;
  rec.eta_ell_MK = b.eta_ell_MK;
  rec.eta_dpsi = b.dpsi_term;
  rec.eta_zh = b.zh_term;
  rec.K = b.split;

  const EtaFMode other = config.eta_f_mode == EtaFMode::SimpsonPaper ? EtaFMode::Quadrature
                                                                     : EtaFMode::SimpsonPaper;
  for (std::size_t j = 1; j <= M; ++j) {
    rec.eta_F_alternative += b.weights.sigma[j] * spec.greens.kappa0() *
                             eta_F(j, spec, grid, *mesh, other, config.samples);
  }

  if (config.split_policy == SplitPolicy::Sweep) {
    const double without_ell = b.total - b.eta_ell_MK;
    for (std::size_t k = 0; k < M; ++k) {
      const double candidate =
          without_ell + eta_ell_MK(k, b.eta_ell, b.eta_ell_delta, b.weights, spec.greens, grid);
      if (!rec.best_eta || candidate < *rec.best_eta) {
        rec.best_eta = candidate;
        rec.best_K = k;
      }
    }
  }
  rec.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
  rec.estimate_seconds = std::chrono::duration<double>(t2 - t1).count();
  return rec;
}

}  // namespace

std::vector<RunRecord> run_matrix(const RunConfig& config) {
  return run_matrix(config, resolve_problem(config));
}

std::vector<RunRecord> run_matrix(const RunConfig& config, const ProblemSpec& spec) {
  config.validate();
  if (const auto violation = validate(spec)) {
    throw std::invalid_argument("problem '" + spec.name + "' is invalid: " + violation->what +
                                " at x = " + std::to_string(violation->x));
  }
  const std::size_t m_max = config.m_values.back();
  const std::size_t finest = production_mesh(spec, m_max).elements();
  OracleOptions oracle;
  oracle.tol = config.oracle_tol;
  oracle.elements = std::max<std::size_t>(2 * finest, 64);
  oracle.sample_elements = 16 * finest;
  oracle.steps = std::max<std::size_t>(256, m_max);
  oracle.cache_dir = config.cache_dir;

  std::vector<RunRecord> records(config.m_values.size());
  std::optional<ReferenceSolution> reference;
  std::string oracle_failure;
  try {
    reference = solve_reference(spec, oracle);
  } catch (const std::exception& e) {
    oracle_failure = e.what();
  }

  if (!reference) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      records[i].M = config.m_values[i];
      records[i].failure = "oracle failure: " + oracle_failure;
    }
    return records;
  }

  // rows in batches of at most `workers`; results land in M order
  for (std::size_t start = 0; start < records.size(); start += config.workers) {
    const std::size_t stop = std::min(records.size(), start + config.workers);
    std::vector<std::future<RunRecord>> pending;
    for (std::size_t i = start; i < stop; ++i) {
      pending.push_back(std::async(config.workers > 1 ? std::launch::async : std::launch::deferred,
                                   [&, i] { return run_row(config, spec, config.m_values[i], *reference); }));
    }
    for (std::size_t i = start; i < stop; ++i) {
      try {
        records[i] = pending[i - start].get();
      } catch (const std::exception& e) {
        records[i] = RunRecord{};
        records[i].M = config.m_values[i];
        records[i].failure = e.what();
      }
    }
  }

  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& prev = records[i - 1];
    auto& cur = records[i];
    if (!prev.ok() || !cur.ok()) continue;
    const double ratio = std::log(static_cast<double>(cur.M) / static_cast<double>(prev.M));
    if (prev.e_M > 0.0 && cur.e_M > 0.0) cur.p_M = std::log(prev.e_M / cur.e_M) / ratio;
    if (prev.eta > 0.0 && cur.eta > 0.0) cur.eta_order = std::log(prev.eta / cur.eta) / ratio;
  }
  return records;
}

std::string format_sci(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", value);
  return buf;
}

namespace {

std::string format_fixed2(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return std::string(width > s.size() ? width - s.size() : 0, ' ') + s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string table1_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "M,e_M,p_M,eta_eE,chi_M\n";
  for (const auto& r : records) {
    if (!r.ok()) continue;
    out << r.M << ',' << format_sci(r.e_M) << ',' << (r.p_M ? format_fixed2(*r.p_M) : "") << ','
        << format_sci(r.eta) << ',' << format_sci(r.chi_M) << '\n';
  }
  return out.str();
}

std::string table2_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "M,eta_init,eta_F,eta_ell_MK,eta_dpsi,eta_zh\n";
  for (const auto& r : records) {
    if (!r.ok()) continue;
    out << r.M << ',' << format_sci(r.eta_init) << ',' << format_sci(r.eta_F) << ','
        << format_sci(r.eta_ell_MK) << ',' << format_sci(r.eta_dpsi) << ',' << format_sci(r.eta_zh)
        << '\n';
  }
  return out.str();
}

std::string table1_text(const std::vector<RunRecord>& records, bool reciprocal_efficiency) {
  std::ostringstream out;
  out << pad("M", 6) << pad("e_M", 12) << pad("p_M", 7) << pad("eta_eE^{M,K}", 14)
      << pad("chi_M", 11) << '\n';
  for (const auto& r : records) {
    if (!r.ok()) {
      out << pad(std::to_string(r.M), 6) << "  failed: " << *r.failure << '\n';
      continue;
    }
    std::string chi;
    if (reciprocal_efficiency) {
      chi = r.chi_M > 0.0 ? "1/" + std::to_string(static_cast<long>(std::lround(r.chi_M))) : "-";
    } else {
      chi = format_sci(r.chi_M);
    }
    out << pad(std::to_string(r.M), 6) << pad(format_sci(r.e_M), 12)
        << pad(r.p_M ? format_fixed2(*r.p_M) : "-", 7) << pad(format_sci(r.eta), 14) << pad(chi, 11)
        << '\n';
  }
  return out.str();
}

std::string table2_text(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << pad("M", 6) << pad("eta_init", 12) << pad("eta_F", 12) << pad("eta_ell^{M,K}", 15)
      << pad("eta_dpsi_u", 12) << pad("eta_z_h", 12) << '\n';
  for (const auto& r : records) {
    if (!r.ok()) continue;
    out << pad(std::to_string(r.M), 6) << pad(format_sci(r.eta_init), 12)
        << pad(format_sci(r.eta_F), 12) << pad(format_sci(r.eta_ell_MK), 15)
        << pad(format_sci(r.eta_dpsi), 12) << pad(format_sci(r.eta_zh), 12) << '\n';
  }
  return out.str();
}

EmittedFiles emit_tables(const std::vector<RunRecord>& records, const std::string& out_dir,
                         bool reciprocal_efficiency) {
  if (records.empty()) throw std::invalid_argument("no records to emit");
  namespace fs = std::filesystem;
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

  EmittedFiles files{(dir / "table1.csv").string(), (dir / "table2.csv").string(),
                     (dir / "table1.txt").string(), (dir / "table2.txt").string(),
                     (dir / "metadata.json").string()};
  write_file(files.table1_csv, table1_csv(records));
  write_file(files.table2_csv, table2_csv(records));
  write_file(files.table1_txt, table1_text(records, reciprocal_efficiency));
  write_file(files.table2_txt, table2_text(records));

  nlohmann::json meta = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json row{{"M", r.M}, {"ok", r.ok()}};
    if (r.ok()) {
      row.update({{"elements", r.elements},
                  {"K", r.K},
                  {"estimator", r.estimator},
                  {"estimator_constants", r.estimator_constants},
                  {"eta_f_mode", r.eta_f_mode},
                  {"eta_F_alternative_mode", r.eta_F_alternative},
                  {"initial_approximation", r.initial_approximation},
                  {"oracle_accuracy", r.oracle_accuracy},
                  {"quadrature", "simpson (reaction, load), exact (diffusion, mass)"},
                  {"solve_seconds", r.solve_seconds},
                  {"estimate_seconds", r.estimate_seconds}});
      if (r.eta_order) row["eta_order"] = *r.eta_order;
      if (r.best_K) {
        row["best_K"] = *r.best_K;
        row["best_eta"] = *r.best_eta;
      }
    } else {
      row["failure"] = *r.failure;
    }
    meta.push_back(std::move(row));
  }
  write_file(files.metadata_json, meta.dump(2) + "\n");
  return files;
}

std::vector<RunRecord> parse_table1_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != "M,e_M,p_M,eta_eE,chi_M") throw std::invalid_argument("unexpected table1 header");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) throw std::invalid_argument("malformed table1 row: " + line);
    RunRecord r;
    r.M = std::stoul(cells[0]);
    r.e_M = std::stod(cells[1]);
    if (!cells[2].empty()) r.p_M = std::stod(cells[2]);
    r.eta = std::stod(cells[3]);
    r.chi_M = std::stod(cells[4]);
    out.push_back(r);
  }
  return out;
}

std::vector<RunRecord> parse_table2_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line != "M,eta_init,eta_F,eta_ell_MK,eta_dpsi,eta_zh") {
    throw std::invalid_argument("unexpected table2 header");
  }
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 6) throw std::invalid_argument("malformed table2 row: " + line);
    RunRecord r;
    r.M = std::stoul(cells[0]);
    r.eta_init = std::stod(cells[1]);
    r.eta_F = std::stod(cells[2]);
    r.eta_ell_MK = std::stod(cells[3]);
    r.eta_dpsi = std::stod(cells[4]);
    r.eta_zh = std::stod(cells[5]);
    out.push_back(r);
  }
  return out;
}

}  // namespace eemax
