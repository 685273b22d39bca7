#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "eemax/experiment.hpp"
#include "eemax/reference_oracle.hpp"
#include "support.hpp"

using namespace eemax;

namespace {

OracleOptions small_options() {
  OracleOptions o;
  o.elements = 64;
  o.steps = 256;
  o.sample_elements = 512;
  return o;
}

std::filesystem::path scratch_dir(const char* name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("zero data gives a zero reference") {
  const auto ref = solve_reference(zero_problem(), small_options());
  CHECK(ref.accuracy == 0.0);
  for (double v : ref.values) CHECK(v == 0.0);
}

TEST_CASE("manufactured reference matches the closed form") {
  const auto spec = manufactured_problem();
  OracleOptions o;
  o.elements = 1024;
  o.sample_elements = 8192;
  const auto ref = solve_reference(spec, o);
  CHECK(ref.accuracy <= o.tol);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.values.size(); ++i) {
    worst = std::max(worst, std::abs(ref.values[i] - (*spec.exact)(ref.mesh->node(i), 1.0)));
  }
  CHECK(worst <= o.tol);

  const auto uh = run(spec, std::make_shared<const SpatialMesh>(production_mesh(spec, 16)), TimeGrid::uniform(1.0, 16))
                      .u.back();
  double closed = 0.0;
  for (std::size_t i = 0; i < ref.values.size(); ++i) {
    const double x = ref.mesh->node(i);
    closed = std::max(closed, std::abs(uh(x) - (*spec.exact)(x, 1.0)));
  }
  CHECK(std::abs(error_at_T(uh, ref) - closed) <= 1e-10);
  CHECK(error_at_T(ref.field(), ref) == 0.0);
}

TEST_CASE("Crank-Nicolson converges at second order") {
  const auto spec = manufactured_problem();
  const SpatialMesh mesh = SpatialMesh::uniform(-1.0, 1.0, 512);
  const auto fine = crank_nicolson(spec, mesh, 256);
  const auto a = crank_nicolson(spec, mesh, 16);
  const auto b = crank_nicolson(spec, mesh, 32);
  const double ea = support::max_abs_diff(a, fine);
  const double eb = support::max_abs_diff(b, fine);
  CHECK(std::log2(ea / eb) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("degree five interpolation reproduces quintics") {
  const SpatialMesh mesh = SpatialMesh::uniform(0.0, 1.0, 10);
  auto p = [](double x) { return 1 - 2 * x + 3 * std::pow(x, 3) - std::pow(x, 5); };
  std::vector<double> values;
  for (double x : mesh.nodes()) values.push_back(p(x));
  for (double x : {0.01, 0.33, 0.5, 0.97}) CHECK(lagrange5(mesh, values, x) == doctest::Approx(p(x)).epsilon(1e-13));
}

TEST_CASE("option validation and failure report") {
  auto o = small_options();
  o.tol = 1e-12;
  CHECK_THROWS_AS(solve_reference(builtin_test_problem(), o), std::invalid_argument);
  o = small_options();
  o.sample_elements = 100;
  CHECK_THROWS_AS(solve_reference(builtin_test_problem(), o), std::invalid_argument);
  o = small_options();
  o.elements = 8;
  o.steps = 4;
  o.tol = 1e-11;
  o.max_refinements = 0;
  o.sample_elements = 64;
  CHECK_THROWS_AS(solve_reference(builtin_test_problem(), o), OracleFailure);
}

TEST_CASE("cache round trip") {
  const auto dir = scratch_dir("eemax_cache_test");
  auto o = small_options();
  o.tol = 1e-6;
  o.cache_dir = dir.string();
  const auto spec = builtin_test_problem();
  const auto first = solve_reference(spec, o);
  const auto path = dir / reference_cache_key(spec, o);
  REQUIRE(std::filesystem::exists(path));

  {
    std::ifstream in(path, std::ios::binary);
    char magic[8];
    in.read(magic, 8);
    CHECK(std::memcmp(magic, "EEMXREF\0", 8) == 0);
    unsigned char version[4];
    in.read(reinterpret_cast<char*>(version), 4);
    CHECK(version[0] == 1);
    CHECK(version[1] == 0);
  }

  const auto second = solve_reference(spec, o);
  CHECK(second.values == first.values);
  CHECK(second.accuracy == first.accuracy);

  const std::uint64_t key = fnv1a64("unrelated");
  CHECK_FALSE(read_reference(path.string(), key).has_value());
  CHECK_FALSE(read_reference((dir / "missing.bin").string(), key).has_value());

  auto other = o;
  other.tol = 1e-7;
  CHECK(reference_cache_key(spec, other) != reference_cache_key(spec, o));
  CHECK(reference_cache_key(manufactured_problem(), o) != reference_cache_key(spec, o));
  std::filesystem::remove_all(dir);
}

TEST_CASE("hash") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
