#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "eemax/problem.hpp"

using namespace eemax;

TEST_CASE("built-in problems validate") {
  for (const auto& name : builtin_problem_names()) {
    CHECK_FALSE(validate(builtin_problem(name)).has_value());
  }
  CHECK_THROWS_AS(builtin_problem("nope"), std::invalid_argument);
}

TEST_CASE("test problem data") {
  const auto p = builtin_test_problem();
  CHECK(p.name == "paper-sect4");
  CHECK(p.reaction(0.5) == doctest::Approx(8.5));
  CHECK(p.initial(0.0) == doctest::Approx(1.0));
  const double t = 0.3;
  const double x = -0.2;
  CHECK(p.source(x, t) == doctest::Approx(std::exp(-4 * t) - std::pow(std::cos(x + t), 4)));
  CHECK(p.greens.kappa1() == doctest::Approx(3.0 / std::pow(2.0, 1.5)));
  CHECK(p.greens.gamma() == 0.5);
}

TEST_CASE("boundary violation of the initial data") {
  auto p = builtin_test_problem();
  p.initial = [](double) { return 1.0; };
  const auto v = validate(p);
  REQUIRE(v.has_value());
  CHECK(v->x == -1.0);
}

TEST_CASE("negative reaction is reported") {
  auto p = builtin_test_problem();
  p.reaction = [](double) { return -1.0; };
  const auto v = validate(p);
  REQUIRE(v.has_value());
  CHECK(v->what.find("reaction") != std::string::npos);
}

TEST_CASE("manufactured source matches the closed form") {
  const auto p = manufactured_problem();
  REQUIRE(p.exact);
  const double k = M_PI / 2;
  for (double x : {-0.7, 0.1, 0.9}) {
    const double t = 0.4;
    const double u = (*p.exact)(x, t);
    const double expected = -u + k * k * u + (5 * x + 6) * u;
    CHECK(p.source(x, t) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("json descriptions") {
  using nlohmann::json;
  const auto named = problem_from_json(json{{"problem", "paper-sect4"}, {"horizon", 0.5}});
  CHECK(named.horizon == 0.5);

  const auto p = problem_from_json(json{
      {"name", "custom"},
      {"domain", {0.0, 1.0}},
      {"diffusion", 0.5},
      {"reaction", {{"kind", "affine"}, {"a", 5}, {"b", 6}}},
      {"source", {{"kind", "time-polynomial"}, {"coefficients", {1.0, 2.0}}}},
      {"initial", {{"kind", "bubble"}, {"amplitude", 1.0}}},
      {"horizon", 2.0},
      {"greens", {{"kappa0", 1}, {"kappa1", 0.5}, {"gamma", 0.1}}}});
  CHECK(p.reaction(1.0) == 11.0);
  CHECK(p.source(0.3, 2.0) == doctest::Approx(5.0));
  CHECK(p.initial(0.5) == doctest::Approx(1.0));
  CHECK(p.greens.kappa1_prime() == 0.0);
  CHECK_FALSE(validate(p).has_value());
  CHECK(p.fingerprint != named.fingerprint);

  CHECK_THROWS(problem_from_json(json{{"problem", "paper-sect4"}, {"greens", {{"kappa0", -1}, {"kappa1", 0}, {"gamma", 0}}}}));
  auto bad = json{{"domain", {0.0, 1.0}}, {"diffusion", 1.0}, {"reaction", {{"kind", "cubic"}}},
                  {"source", {{"kind", "zero"}}}, {"initial", {{"kind", "zero"}}}, {"horizon", 1.0},
                  {"greens", {{"kappa0", 1}, {"kappa1", 0}, {"gamma", 0}}}};
  CHECK_THROWS_AS(problem_from_json(bad), std::invalid_argument);
}

TEST_CASE("load_problem reads a file") {
  const auto path = std::filesystem::temp_directory_path() / "eemax_problem_test.json";
  {
    std::ofstream out(path);
    out << R"({"problem": "manufactured"})";
  }
  const auto p = load_problem(path.string());
  CHECK(p.name == "manufactured");
  std::filesystem::remove(path);
  CHECK_THROWS(load_problem((std::filesystem::temp_directory_path() / "eemax_missing.json").string()));
}

TEST_CASE("Green's bounds") {
  const GreensBounds g(1.0, 2.0, 0.5, 0.25);
  CHECK(g.phi0(2.0) == doctest::Approx(std::exp(-0.5)));
  CHECK(g.phi1(1.0) == doctest::Approx(2.5 * std::exp(-0.25)));
  CHECK_THROWS_AS(GreensBounds(1.0, NAN, 0.0, 0.0), std::invalid_argument);
}
