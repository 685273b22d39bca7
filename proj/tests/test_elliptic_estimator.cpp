#include <doctest.h>

#include <cmath>

#include "eemax/elliptic_estimator.hpp"
#include "support.hpp"

using namespace eemax;
using doctest::Approx;

TEST_CASE("constant load on the Laplacian is bounded tightly") {
  const double c = 3.0;
  const double eps = 0.5;
  const std::size_t n = 10;
  const double h = 2.0 / static_cast<double>(n);
  const auto mesh = support::uniform_mesh(-1.0, 1.0, n);
  const SpaceFunction zero = [](double) { return 0.0; };
  const auto g = as_element_function(SpaceFunction([c](double) { return c; }));
  const auto yh = solve_elliptic(mesh, eps, zero, g);
  const double eta = ResidualEstimator1D(eps, zero).evaluate(yh, g);
  CHECK(eta == Approx(c * h * h / (8 * eps)).epsilon(1e-13));
  // exact y = c (1 - x^2) / (2 eps); y_h interpolates it, the gap peaks at element midpoints
  const double error = sup_norm(
      *mesh, [&](std::size_t e, double x, double s) { return yh.at_local(e, s) - c * (1 - x * x) / (2 * eps); }, 9);
  CHECK(error == Approx(eta).epsilon(1e-10));
}

TEST_CASE("zero residual gives zero") {
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 8);
  const auto spec = builtin_test_problem();
  const auto yh = NodalField::interpolate(mesh, spec.initial);
  const ElementFunction g = [&](std::size_t e, double x, double s) { return spec.reaction(x) * yh.at_local(e, s); };
  CHECK(default_estimator_eval(yh, g, spec) == 0.0);
}

TEST_CASE("reliability against a refined solve") {
  const auto spec = builtin_test_problem();
  const auto coarse = support::uniform_mesh(-1.0, 1.0, 16);
  const auto shift = NodalField::interpolate(coarse, [](double x) { return 0.3 * (1 - x * x) * std::sin(3 * x); });
  const SpaceFunction g = [&](double x) { return spec.source(x, 0.0) + shift(x); };
  const auto yh = solve_elliptic(coarse, spec.diffusion, spec.reaction, as_element_function(g));
  const auto fine = support::uniform_mesh(-1.0, 1.0, 16 * 64);
  const auto yf = solve_elliptic(fine, spec.diffusion, spec.reaction, as_element_function(g));
  const double gap = sup_norm(*fine, [&](std::size_t e, double x, double s) { return yh(x) - yf.at_local(e, s); }, 3);
  CHECK(default_estimator_eval(yh, as_element_function(g), spec) >= gap);
}

TEST_CASE("second order under refinement") {
  const auto spec = builtin_test_problem();
  const SpaceFunction g = [&](double x) { return spec.source(x, 0.5); };
  auto eta = [&](std::size_t n) {
    const auto mesh = support::uniform_mesh(-1.0, 1.0, n);
    const auto yh = solve_elliptic(mesh, spec.diffusion, spec.reaction, as_element_function(g));
    return default_estimator_eval(yh, as_element_function(g), spec);
  };
  CHECK(eta(32) / eta(64) == Approx(4.0).epsilon(0.125));
}

TEST_CASE("registry") {
  const auto spec = builtin_test_problem();
  const auto est = make_estimator("residual-1d", spec);
  CHECK(est->name() == "residual-1d");
  CHECK(est->constants().find("1/(8*eps)") != std::string::npos);
  CHECK_THROWS_AS(make_estimator("literature", spec), std::invalid_argument);
}

TEST_CASE("per-step elliptic indicators") {
  auto spec = builtin_test_problem();
  spec.source = [](double x, double) { return 1.0 + x; };
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 16);
  const auto y = solve_elliptic(mesh, spec.diffusion, spec.reaction,
                                as_element_function(SpaceFunction([](double x) { return 1.0 + x; })));
  const auto grid = TimeGrid::uniform(1.0, 8);
  const auto traj = run(spec, grid, y);
  const auto psi = compute_psi_family(traj, grid, spec);
  const auto est = make_estimator("residual-1d", spec);
  const double first = eta_ell(0, traj, psi, *est, spec, grid);
  CHECK(first > 0.0);
  for (std::size_t j = 1; j <= 8; ++j) {
    CHECK(eta_ell(j, traj, psi, *est, spec, grid) == Approx(first).epsilon(1e-9));
    CHECK(eta_ell_delta(j, traj, psi, *est, spec, grid) < 1e-9);
  }
}

TEST_CASE("indicators scale with the data") {
  const auto base = builtin_test_problem();
  auto scaled = base;
  const double alpha = -2.5;
  scaled.source = [&](double x, double t) { return alpha * base.source(x, t); };
  scaled.initial = [&](double x) { return alpha * base.initial(x); };
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 16);
  const auto grid = TimeGrid::uniform(1.0, 8);
  const auto t1 = run(base, mesh, grid);
  const auto t2 = run(scaled, mesh, grid);
  const auto p1 = compute_psi_family(t1, grid, base);
  const auto p2 = compute_psi_family(t2, grid, scaled);
  const auto est = make_estimator("residual-1d", base);
  for (std::size_t j : {0u, 3u, 8u}) {
    CHECK(eta_ell(j, t2, p2, *est, scaled, grid) ==
          Approx(std::abs(alpha) * eta_ell(j, t1, p1, *est, base, grid)).epsilon(1e-10));
  }
}

TEST_CASE("eta_ell_delta is the estimator of the differences") {
  const auto spec = builtin_test_problem();
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 16);
  const auto grid = TimeGrid::uniform(1.0, 8);
  const auto traj = run(spec, mesh, grid);
  const auto psi = compute_psi_family(traj, grid, spec);
  const auto est = make_estimator("residual-1d", spec);
  const std::size_t j = 5;
  const double tau = grid.step(j);
  const auto du = delta_t(traj.u[j], traj.u[j - 1], tau);
  const auto dpsi = delta_t(psi.psi_u[j], psi.psi_u[j - 1], tau);
  const ElementFunction g = [&](std::size_t e, double x, double s) {
    return (spec.source(x, grid.time(j)) - spec.source(x, grid.time(j - 1))) / tau + dpsi.at_local(e, s);
  };
  CHECK(eta_ell_delta(j, traj, psi, *est, spec, grid) == Approx(default_estimator_eval(du, g, spec)).epsilon(1e-12));
}
