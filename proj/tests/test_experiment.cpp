#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eemax/experiment.hpp"

using namespace eemax;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small_config(std::vector<std::size_t> ms) {
  RunConfig c;
  c.m_values = std::move(ms);
  return c;
}

std::filesystem::path scratch_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config helpers") {
  CHECK(powers_of_two(16, 256) == std::vector<std::size_t>{16, 32, 64, 128, 256});
  CHECK(powers_of_two(20, 64) == std::vector<std::size_t>{32, 64});
  CHECK(parse_split_policy("sweep") == SplitPolicy::Sweep);
  CHECK_THROWS(parse_split_policy("first"));

  RunConfig c;
  apply_config_json(c, nlohmann::json{{"m_min", 4}, {"m_max", 8}, {"k_policy", "sweep"}, {"eta_f_mode", "quadrature"},
                                      {"workers", 2}, {"initial", "l2-projection"}});
  CHECK(c.m_values == std::vector<std::size_t>{4, 8});
  CHECK(c.split_policy == SplitPolicy::Sweep);
  CHECK(c.eta_f_mode == EtaFMode::Quadrature);
  CHECK(c.initial == InitialApproximation::L2Projection);
  CHECK(c.workers == 2);
  CHECK_NOTHROW(c.validate());

  c.m_values = {1};
  CHECK_THROWS(c.validate());
  c.m_values = {8, 4};
  CHECK_THROWS(c.validate());
  c = RunConfig{};
  c.estimator = "unknown";
  CHECK_THROWS(c.validate());
}

TEST_CASE("production mesh couples h and tau") {
  const auto spec = builtin_test_problem();
  const auto mesh = production_mesh(spec, 16);
  CHECK(mesh.elements() == 32);
  CHECK(mesh.max_width() == doctest::Approx(1.0 / 16));
}

TEST_CASE("two rows: order only on the second") {
  const auto records = run_matrix(small_config({16, 32}));
  REQUIRE(records.size() == 2);
  CHECK(records[0].ok());
  CHECK_FALSE(records[0].p_M.has_value());
  REQUIRE(records[1].p_M.has_value());
  CHECK(*records[1].p_M > 1.8);
  for (const auto& r : records) {
    CHECK(r.chi_M == doctest::Approx(r.eta / r.e_M));
    CHECK(r.eta >= r.e_M);
    CHECK(r.K == r.M - 1);
    const double sum = r.eta_init + r.eta_F + r.eta_ell_MK + r.eta_dpsi + r.eta_zh;
    CHECK(std::abs(sum - r.eta) <= 1e-12 * r.eta);
  }
}

TEST_CASE("zero problem rows are all zero") {
  auto c = small_config({4, 8});
  c.problem = "zero";
  for (const auto& r : run_matrix(c)) {
    CHECK(r.e_M == 0.0);
    CHECK(r.eta == 0.0);
    CHECK(r.eta_ell_MK == 0.0);
  }
}

TEST_CASE("sweep records the best split") {
  auto c = small_config({8});
  c.split_policy = SplitPolicy::Sweep;
  const auto r = run_matrix(c).front();
  REQUIRE(r.best_K.has_value());
  CHECK(*r.best_K < 8);
  CHECK(*r.best_eta <= r.eta);
}

TEST_CASE("parallel rows match serial rows") {
  auto c = small_config({8, 16, 32});
  const auto serial = run_matrix(c);
  c.workers = 3;
  const auto parallel = run_matrix(c);
  CHECK(table1_csv(serial) == table1_csv(parallel));
  CHECK(table2_csv(serial) == table2_csv(parallel));
}

TEST_CASE("emitted tables") {
  const auto dir = scratch_dir("eemax_emit_test");
  const auto records = run_matrix(small_config({16}));
  const auto files = emit_tables(records, dir.string());
  const auto t1 = slurp(files.table1_csv);
  const auto t2 = slurp(files.table2_csv);
  CHECK(t1.rfind("M,e_M,p_M,eta_eE,chi_M\n", 0) == 0);
  CHECK(t2.rfind("M,eta_init,eta_F,eta_ell_MK,eta_dpsi,eta_zh\n", 0) == 0);
  CHECK(std::count(t1.begin(), t1.end(), '\n') == 2);
  CHECK(std::count(t2.begin(), t2.end(), '\n') == 2);
  CHECK(std::filesystem::exists(files.metadata_json));
  const auto meta = nlohmann::json::parse(slurp(files.metadata_json));
  CHECK(meta[0]["estimator"] == "residual-1d");
  CHECK(meta[0]["K"] == 15);

  const auto p1 = parse_table1_csv(t1);
  const auto p2 = parse_table2_csv(t2);
  REQUIRE(p1.size() == 1);
  CHECK(format_sci(p1[0].e_M) == format_sci(records[0].e_M));
  CHECK(format_sci(p1[0].eta) == format_sci(records[0].eta));
  CHECK(format_sci(p2[0].eta_zh) == format_sci(records[0].eta_zh));
  CHECK_FALSE(p1[0].p_M.has_value());

  const auto again = emit_tables(run_matrix(small_config({16})), (dir / "again").string());
  CHECK(slurp(again.table1_csv) == t1);
  CHECK(slurp(again.table2_csv) == t2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("formatting") {
  CHECK(format_sci(3.872e-4) == "3.872e-04");
  CHECK(format_sci(0.0) == "0.000e+00");
  RunRecord bad;
  bad.M = 4;
  bad.failure = "oracle failure: no convergence";
  RunRecord good;
  good.M = 8;
  good.e_M = 1e-3;
  good.eta = 2e-2;
  good.chi_M = 20;
  const std::vector<RunRecord> rs = {bad, good};
  CHECK(table1_csv(rs) == "M,e_M,p_M,eta_eE,chi_M\n8,1.000e-03,,2.000e-02,2.000e+01\n");
  CHECK(table1_text(rs, true).find("1/20") != std::string::npos);
  CHECK(table1_text(rs, false).find("failed") != std::string::npos);
  CHECK_THROWS_AS(emit_tables({}, "unused"), std::invalid_argument);
  CHECK_THROWS_AS(parse_table1_csv("M,e\n"), std::invalid_argument);
}
