#include "eemax/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "eemax/elliptic_estimator.hpp"
#include "eemax/parabolic_estimator.hpp"
#include "eemax/reconstruction.hpp"

namespace eemax::checks {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fixed(double v, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_diff(const NodalField& a, const NodalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

// |a - b| scaled by the size of the fields compared, never by less than 1
double scaled_diff(const NodalField& a, const NodalField& b) {
  return max_diff(a, b) / std::max({1.0, sup_norm(a), sup_norm(b)});
}

ProblemSpec shifted_problem() {
  return problem_from_json(nlohmann::json{
      {"name", "shifted-polynomial"},
      {"domain", {0.0, 2.0}},
      {"diffusion", 0.1},
      {"reaction", {{"kind", "constant"}, {"value", 2.0}}},
      {"source", {{"kind", "time-polynomial"}, {"coefficients", {1.0, -3.0, 4.0}}}},
      {"initial", {{"kind", "bubble"}, {"amplitude", 2.0}}},
      {"horizon", 0.5},
      {"greens", {{"kappa0", 1.0}, {"kappa1", 1.0}, {"kappa1_prime", 0.0}, {"gamma", 0.0}}}});
}

}  // namespace

std::string to_string(Status status) {
  switch (status) {
    case Status::Pass: return "PASS";
    case Status::Flagged: return "FLAGGED";
    case Status::Fail: return "FAIL";
  }
  return "?";
}

std::string format(const CheckResult& result, bool verbose) {
  std::ostringstream out;
  out << '[' << to_string(result.status) << "] " << result.criterion << ' ' << result.title;
  if (!result.details.empty()) {
    if (verbose) {
      for (const auto& d : result.details) out << "\n      " << d;
    } else {
      out << ": " << result.details.front();
    }
  }
  return out.str();
}

CheckResult identity_suite(const Tolerances& tol) {
  CheckResult res{6, "discrete identities", Status::Pass, {}};
  const std::vector<ProblemSpec> problems = {builtin_test_problem(), manufactured_problem(),
                                             shifted_problem()};
  double worst = 0.0;
  std::string worst_where;
  for (const auto& spec : problems) {
    for (std::size_t m : {4u, 16u, 64u}) {
      const auto mesh = std::make_shared<const SpatialMesh>(production_mesh(spec, m));
      const auto grid = TimeGrid::uniform(spec.horizon, m);
      const auto traj = run(spec, mesh, grid);
      const auto psi = compute_psi_family(traj, grid, spec);
      const auto stiffness = assemble_stiffness(*mesh, spec.diffusion, spec.reaction);
      auto note = [&](double d, const char* what, std::size_t j) {
        if (d > worst) {
          worst = d;
          worst_where = spec.name + ", M=" + std::to_string(m) + ", j=" + std::to_string(j) + ", " + what;
        }
      };
      for (std::size_t j = 1; j <= m; ++j) {
        const double tau = grid.step(j);
        note(scaled_diff(psi.psi_v[j], -1.0 * delta_t(traj.v[j], traj.v[j - 1], tau)), "psi_v", j);
        note(scaled_diff(psi.psi_w_half(j), -1.0 * delta_t(traj.w_half(j), traj.w_at(j - 1), 0.5 * tau)),
             "psi_w half", j);
        note(scaled_diff(psi.psi_w_at(j), -1.0 * delta_t(traj.w_at(j), traj.w_half(j), 0.5 * tau)),
             "psi_w full", j);
        note(scaled_diff(psi.psi_u[j], 2.0 * psi.psi_w_at(j) - psi.psi_v[j]), "psi_u", j);
        note(scaled_diff(traj.u[j], 2.0 * traj.w_at(j) - traj.v[j]), "u = 2w - v", j);

        const auto star = compute_star_defect(traj, psi, grid, spec, j);
        const auto lhs = stiffness.apply(interior_values(star.z_star));
        const auto rhs = assemble_load(*mesh, star.psi_minus_f());
        double d = 0.0;
        for (std::size_t i = 0; i < lhs.size(); ++i) d = std::max(d, std::abs(lhs[i] - rhs[i]));
        note(d / std::max({1.0, max_abs(lhs), max_abs(rhs)}), "z* relation", j);
      }
    }
  }
  if (worst > tol.identity) res.status = Status::Fail;
  res.details.push_back("worst scaled defect " + sci(worst) + " (limit " + sci(tol.identity) + ")" +
                        (worst_where.empty() ? "" : " at " + worst_where));
  return res;
}

CheckResult weight_oracle(std::uint64_t seed, std::size_t grids, const Tolerances& tol) {
  using boost::math::quadrature::gauss_kronrod;
  CheckResult res{7, "weight oracle", Status::Pass, {}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> steps(2, 40);

  auto integrate = [](auto f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
  };
  auto rel = [](double approx, double exact) {
    if (approx == exact) return 0.0;
    return std::abs(approx - exact) / std::max(std::abs(exact), 1e-300);
  };

  double worst = 0.0;
  std::string worst_where;
  std::size_t infinite_checked = 0;
  for (std::size_t g = 0; g < grids; ++g) {
    const std::size_t m = steps(rng);
    const double horizon = 0.25 + 2.75 * unit(rng);
    std::vector<double> cuts(m - 1);
    for (auto& c : cuts) c = unit(rng);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> times{0.0};
    for (double c : cuts) {
      if (horizon * c > times.back() + 1e-6 * horizon) times.push_back(horizon * c);
    }
    times.push_back(horizon);
    const TimeGrid grid(times);
    // every fifth grid has kappa1 = 0 so mu_M is finite there
    const double k1 = g % 5 == 4 ? 0.0 : 2.0 * unit(rng);
    const GreensBounds greens(0.5 + 1.5 * unit(rng), k1, unit(rng), unit(rng));
    const auto w = compute_weights(grid, greens);
    const double T = grid.horizon();

    auto note = [&](double r, const char* what, std::size_t j) {
      if (r > worst) {
        worst = r;
        worst_where = std::string(what) + " grid " + std::to_string(g) + " j=" + std::to_string(j) + "/" +
                      std::to_string(grid.steps());
      }
    };
    for (std::size_t j = 0; j <= grid.steps(); ++j) {
      const double tj = grid.time(j);
      const double sigma =
          j == grid.steps()
              ? 1.0
              : 1.0 - integrate([&](double s) { return greens.gamma() * std::exp(-greens.gamma() * (T - s)); }, tj, T);
      note(rel(w.sigma[j], sigma), "sigma", j);
      if (j == 0) continue;
      const double a = grid.time(j - 1);
      const double tau = grid.step(j);
      auto kernel = [&](double s) { return greens.kappa1() / (T - s) + greens.kappa1_prime(); };
      if (j == grid.steps() && greens.kappa1() > 0.0) {
        ++infinite_checked;
        if (!std::isinf(w.mu[j])) note(std::numeric_limits<double>::infinity(), "mu_M not infinite", j);
      } else {
        note(rel(w.mu[j], integrate(kernel, a, tj)), "mu", j);
      }
      const double bubble =
          integrate([&](double s) { return 0.5 * (tj - s) * (s - a) * kernel(s); }, a, tj);
      note(rel(w.chi[j], std::min(greens.kappa0() * tau * tau / 4.0, bubble)), "chi", j);
    }
  }
  if (!(worst <= tol.weight_relative)) res.status = Status::Fail;
  res.details.push_back("worst relative deviation " + sci(worst) + " over " + std::to_string(grids) +
                        " grids (limit " + sci(tol.weight_relative) + ")" +
                        (worst_where.empty() ? "" : " at " + worst_where));
  res.details.push_back(std::to_string(infinite_checked) + " grids with mu_M = +inf confirmed");
  return res;
}

CheckResult elliptic_family(const Tolerances& tol) {
  CheckResult res{8, "elliptic estimator", Status::Pass, {}};
  struct Case {
    const char* name;
    std::function<double(double)> r;
  };
  const std::vector<Case> cases = {{"r=5x+6", [](double x) { return 5.0 * x + 6.0; }},
                                   {"r=0", [](double) { return 0.0; }},
                                   {"r=100", [](double) { return 100.0; }}};
  const double eps = 1.0;
  auto y = [](double x) { return (1.0 - x * x) * std::exp(x); };
  auto ypp = [](double x) { return (-1.0 - 4.0 * x - x * x) * std::exp(x); };
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  for (const auto& c : cases) {
    const SpaceFunction g = [&](double x) { return -eps * ypp(x) + c.r(x) * y(x); };
    for (std::size_t n = 8; n <= 512; n *= 2) {
      const auto mesh = std::make_shared<const SpatialMesh>(SpatialMesh::uniform(-1.0, 1.0, n));
      const auto yh = solve_elliptic(mesh, eps, c.r, as_element_function(g));
      const double error = sup_norm(
          *mesh, [&](std::size_t e, double x, double s) { return yh.at_local(e, s) - y(x); }, 65);
      const double eta = ResidualEstimator1D(eps, c.r).evaluate(yh, as_element_function(g));
      const double ratio = eta / error;
      min_ratio = std::min(min_ratio, ratio);
      max_ratio = std::max(max_ratio, ratio);
      if (ratio < 1.0 || ratio > tol.elliptic_max_ratio) {
        res.status = Status::Fail;
        res.details.push_back(std::string(c.name) + ", N=" + std::to_string(n) + ": eta/error = " +
                              fixed(ratio, 3));
      }
    }
  }
  res.details.insert(res.details.begin(), "eta/error in [" + fixed(min_ratio, 3) + ", " +
                                              fixed(max_ratio, 3) + "] over N = 8..512 (limit " +
                                              fixed(tol.elliptic_max_ratio, 0) + ")");
  return res;
}

CheckResult manufactured_parabolic(const RunConfig& base, const Tolerances& tol) {
  CheckResult res{9, "manufactured parabolic solution", Status::Pass, {}};
  RunConfig config = base;
  config.problem = "manufactured";
  config.problem_file.clear();
  const auto records = run_matrix(config);
  std::ostringstream orders;
  for (const auto& r : records) {
    if (!r.ok()) {
      res.status = Status::Fail;
      res.details.push_back("M=" + std::to_string(r.M) + " failed: " + *r.failure);
      continue;
    }
    if (r.eta < r.e_M) {
      res.status = Status::Fail;
      res.details.push_back("M=" + std::to_string(r.M) + ": eta " + sci(r.eta) + " < e_M " + sci(r.e_M));
    }
    if (r.p_M) {
      orders << ' ' << fixed(*r.p_M);
      if (std::abs(*r.p_M - tol.order) > tol.order_band) res.status = Status::Fail;
    }
  }
  res.details.insert(res.details.begin(), "EOC" + orders.str() + ", eta >= e_M on " +
                                              std::to_string(records.size()) + " rows checked");
  return res;
}

std::vector<CheckResult> matrix_criteria(const std::vector<RunRecord>& records, double seconds,
                                         const Tolerances& tol) {
  CheckResult c1{1, "convergence order", Status::Pass, {}};
  CheckResult c2{2, "error magnitudes", Status::Pass, {}};
  CheckResult c3{3, "reliability", Status::Pass, {}};
  CheckResult c4{4, "efficiency band", Status::Pass, {}};
  CheckResult c5{5, "breakdown dominance", Status::Pass, {}};

  for (const auto& r : records) {
    if (!r.ok()) {
      for (auto* c : {&c1, &c2, &c3, &c4, &c5}) {
        c->status = Status::Fail;
        c->details.push_back("M=" + std::to_string(r.M) + " failed: " + *r.failure);
      }
    }
  }

  std::ostringstream p_line;
  std::ostringstream q_line;
  for (const auto& r : records) {
    if (!r.ok() || r.M < tol.order_from_m) continue;
    if (!r.p_M || std::abs(*r.p_M - tol.order) > tol.order_band) c1.status = Status::Fail;
    if (!r.eta_order || std::abs(*r.eta_order - tol.order) > tol.order_band) c4.status = Status::Fail;
    p_line << ' ' << (r.p_M ? fixed(*r.p_M) : "-");
    q_line << ' ' << (r.eta_order ? fixed(*r.eta_order) : "-");
  }
  if (seconds > tol.runtime_seconds) c1.status = Status::Fail;
  c1.details.insert(c1.details.begin(), "p_M for M >= " + std::to_string(tol.order_from_m) + ":" +
                                            p_line.str() + "; runtime " + fixed(seconds, 1) + " s");

  bool any_flag = false;
  std::ostringstream dev;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.ok()) continue;
    const int k = static_cast<int>(std::lround(std::log2(static_cast<double>(r.M)))) - 4;
    if (k < 0 || k >= 5 || (std::size_t{16} << k) != r.M) {
      c2.details.push_back("M=" + std::to_string(r.M) + " has no published value");
      continue;
    }
    const double published = kPublishedErrors[k];
    const double deviation = r.e_M / published - 1.0;
    dev << " M=" << r.M << ':' << (deviation >= 0 ? "+" : "") << fixed(100.0 * deviation, 1) << '%';
    const double factor = std::max(r.e_M / published, published / r.e_M);
    if (std::abs(deviation) <= tol.magnitude_band) continue;
    if (factor <= tol.magnitude_flag_factor) {
      any_flag = true;
    } else {
      c2.status = Status::Fail;
    }
  }

  std::ostringstream eff;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    if (!(r.eta >= r.e_M)) {
      c3.status = Status::Fail;
      c3.details.push_back("M=" + std::to_string(r.M) + ": eta " + sci(r.eta) + " < e_M " + sci(r.e_M));
    }
    const double ratio = r.eta > 0.0 ? r.e_M / r.eta : std::numeric_limits<double>::infinity();
    eff << " 1/" << fixed(1.0 / ratio, 0);
    if (ratio < tol.efficiency_low || ratio > tol.efficiency_high) c4.status = Status::Fail;

    const double parts[] = {r.eta_init, r.eta_F, r.eta_ell_MK, r.eta_dpsi, r.eta_zh};
    const double largest = *std::max_element(std::begin(parts), std::end(parts));
    const double share = r.eta > 0.0 ? r.eta_ell_MK / r.eta : 0.0;
    c5.details.push_back("M=" + std::to_string(r.M) + ": eta_ell share " + fixed(100.0 * share, 1) + "%" +
                         (r.eta_ell_MK < largest ? ", not the largest component" : ""));
    if (r.eta_ell_MK < largest || share < tol.dominance_share) c5.status = Status::Fail;
  }
  c3.details.insert(c3.details.begin(),
                    c3.status == Status::Pass ? "eta >= e_M on all " + std::to_string(records.size()) + " rows"
                                              : "eta < e_M on some rows");
  c4.details.insert(c4.details.begin(), "e_M/eta:" + eff.str() + " (band 1/" +
                                            fixed(1.0 / tol.efficiency_low, 0) + "..1/" +
                                            fixed(1.0 / tol.efficiency_high, 0) + "); eta EOC:" +
                                            q_line.str());

  // a row outside the 10% band but within the flag factor is acceptable only while 1, 3, 4 hold
  if (c2.status == Status::Pass && any_flag) {
    const bool prerequisites = !c1.failed() && !c3.failed() && !c4.failed();
    c2.status = prerequisites ? Status::Flagged : Status::Fail;
    if (!prerequisites) c2.details.push_back("rows outside 10% cannot be flagged while criteria 1, 3, 4 do not all hold");
  }
  c2.details.insert(c2.details.begin(), "deviation from published e_M:" + dev.str());

  return {c1, c2, c3, c4, c5};
}

std::vector<CheckResult> acceptance_suite(const SuiteOptions& options, const Tolerances& tol) {
  RunConfig config;
  config.cache_dir = options.cache_dir;
  config.workers = options.workers;

  const auto start = std::chrono::steady_clock::now();
  std::vector<RunRecord> records;
  std::string failure;
  try {
    records = run_matrix(config);
  } catch (const std::exception& e) {
    failure = e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<CheckResult> out;
  if (failure.empty()) {
    out = matrix_criteria(records, seconds, tol);
  } else {
    for (int c = 1; c <= 5; ++c) out.push_back({c, "matrix run", Status::Fail, {failure}});
  }
  auto guarded = [&](int criterion, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({criterion, "error", Status::Fail, {e.what()}});
    }
  };
  guarded(6, [&] { return identity_suite(tol); });
  guarded(7, [&] { return weight_oracle(20240611, 20, tol); });
  guarded(8, [&] { return elliptic_family(tol); });
  guarded(9, [&] { return manufactured_parabolic(config, tol); });
  return out;
}

bool is_reliability_criterion(int criterion) {
  return criterion == 3 || criterion == 6 || criterion == 7 || criterion == 8 || criterion == 9;
}

}  // namespace eemax::checks
