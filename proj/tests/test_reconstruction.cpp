#include <doctest.h>

#include <cmath>

#include "eemax/reconstruction.hpp"
#include "support.hpp"

using namespace eemax;

namespace {

ProblemSpec linear_in_time() {
  return problem_from_json(nlohmann::json{
      {"domain", {-1.0, 1.0}},
      {"diffusion", 1.0},
      {"reaction", {{"kind", "affine"}, {"a", 5}, {"b", 6}}},
      {"source", {{"kind", "time-polynomial"}, {"coefficients", {1.0, 3.0}}}},
      {"initial", {{"kind", "sine-arch"}}},
      {"horizon", 1.0},
      {"greens", {{"kappa0", 1}, {"kappa1", 1}, {"gamma", 0.5}}}});
}

}  // namespace

TEST_CASE("psi vanishes on the discrete elliptic solution") {
  const auto spec = builtin_test_problem();
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 32);
  const double t = 0.37;
  const auto y = solve_elliptic(mesh, spec.diffusion, spec.reaction,
                                as_element_function(SpaceFunction([&](double x) { return spec.source(x, t); })));
  CHECK(sup_norm(compute_psi(y, t, spec)) < 1e-10);
}

TEST_CASE("psi identities on one run") {
  const auto spec = builtin_test_problem();
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 16);
  const auto grid = TimeGrid::uniform(1.0, 8);
  const auto traj = run(spec, mesh, grid);
  const auto psi = compute_psi_family(traj, grid, spec);
  REQUIRE(psi.psi_w.size() == 17);
  for (std::size_t j = 1; j <= 8; ++j) {
    const double tau = grid.step(j);
    // with (psi, chi)_h = a_h(phi, chi) - (f, chi)_h the Euler step reads delta_t v = -psi_v
    CHECK(sup_norm(psi.psi_v[j] + delta_t(traj.v[j], traj.v[j - 1], tau)) < 1e-10);
    CHECK(sup_norm(psi.psi_w_half(j) + delta_t(traj.w_half(j), traj.w_at(j - 1), tau / 2)) < 1e-10);
    CHECK(sup_norm(psi.psi_w_at(j) + delta_t(traj.w_at(j), traj.w_half(j), tau / 2)) < 1e-10);
    CHECK(sup_norm(psi.psi_u[j] - (2.0 * psi.psi_w_at(j) - psi.psi_v[j])) < 1e-10);
  }
}

TEST_CASE("star defect") {
  const auto spec = builtin_test_problem();
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 16);
  const auto grid = TimeGrid::uniform(1.0, 8);
  const auto traj = run(spec, mesh, grid);
  const auto psi = compute_psi_family(traj, grid, spec);
  const auto stars = compute_star_defects(traj, psi, grid, spec);
  REQUIRE(stars.size() == 8);
  const auto a = assemble_stiffness(*mesh, spec.diffusion, spec.reaction);
  for (std::size_t j = 1; j <= 8; ++j) {
    const auto& s = stars[j - 1];
    const auto expected = traj.w_half(j) - traj.w_at(j - 1) - 0.5 * (traj.v[j] - traj.v[j - 1]);
    CHECK(sup_norm(s.z_star - expected) < 1e-15);
    const double t0 = grid.time(j - 1);
    const double t1 = grid.time(j);
    const double x = 0.3;
    CHECK(s.f_star(x) == doctest::Approx(0.5 * (spec.source(x, t1) - 2 * spec.source(x, grid.midpoint(j)) +
                                                spec.source(x, t0))));
    const auto lhs = a.apply(interior_values(s.z_star));
    const auto rhs = assemble_load(*mesh, s.psi_minus_f());
    CHECK(support::max_abs_diff(lhs, rhs) < 1e-10);
  }
  CHECK_THROWS_AS(compute_star_defect(traj, psi, grid, spec, 0), std::out_of_range);
  CHECK_THROWS_AS(compute_star_defect(traj, psi, grid, spec, 9), std::out_of_range);
}

TEST_CASE("second difference of a linear source vanishes") {
  const auto spec = linear_in_time();
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 8);
  const auto grid = TimeGrid::uniform(1.0, 4);
  const auto traj = run(spec, mesh, grid);
  const auto psi = compute_psi_family(traj, grid, spec);
  for (const auto& s : compute_star_defects(traj, psi, grid, spec)) {
    for (double x : {-0.9, 0.0, 0.4}) CHECK(std::abs(s.f_star(x)) < 1e-14);
  }
}

TEST_CASE("steady state has no extrapolation defect") {
  auto spec = builtin_test_problem();
  spec.source = [](double x, double) { return 2.0 - x * x; };
  const auto mesh = support::uniform_mesh(-1.0, 1.0, 16);
  const auto y = solve_elliptic(mesh, spec.diffusion, spec.reaction,
                                as_element_function(SpaceFunction([](double x) { return 2.0 - x * x; })));
  const auto grid = TimeGrid::uniform(1.0, 8);
  const auto traj = run(spec, grid, y);
  const auto psi = compute_psi_family(traj, grid, spec);
  for (const auto& s : compute_star_defects(traj, psi, grid, spec)) {
    CHECK(sup_norm(s.z_star) < 1e-13);
    CHECK(sup_norm(s.psi_star) < 1e-10);
  }
}
