#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace eemax {

using SpaceFunction = std::function<double(double x)>;
using SpaceTimeFunction = std::function<double(double x, double t)>;

/// Constants of the L1 bounds on the parabolic Green's function:
///   |G(t)|_1 <= kappa0 exp(-gamma t),
///   |dG/dt(t)|_1 <= (kappa1 / t + kappa1_prime) exp(-gamma t).
/// They are problem data; nothing here tries to derive them.
class GreensBounds {
 public:
  GreensBounds(double kappa0, double kappa1, double kappa1_prime, double gamma);

  double kappa0() const { return kappa0_; }
  double kappa1() const { return kappa1_; }
  double kappa1_prime() const { return kappa1_prime_; }
  double gamma() const { return gamma_; }

  /// phi0(t) = kappa0 exp(-gamma t)
  double phi0(double t) const;
  /// phi1(t) = (kappa1 / t + kappa1') exp(-gamma t)
  double phi1(double t) const;

 private:
  double kappa0_;
  double kappa1_;
  double kappa1_prime_;
  double gamma_;
};

/// u_t - eps u'' + r(x) u = f(x, t) on (x_left, x_right) x (0, T],
/// u(., 0) = u0, homogeneous Dirichlet data.
struct ProblemSpec {
  std::string name;
  double x_left = 0.0;
  double x_right = 1.0;
  double diffusion = 1.0;
  SpaceFunction reaction;
  SpaceTimeFunction source;
  SpaceFunction initial;
  double horizon = 1.0;
  GreensBounds greens{1.0, 0.0, 0.0, 0.0};
  /// Canonical description used to key cached reference solutions.
  std::string fingerprint;
  /// Closed-form solution when one is known (manufactured problems).
  std::optional<SpaceTimeFunction> exact;

  double length() const { return x_right - x_left; }
};

struct Violation {
  std::string what;
  double x = 0.0;
};

/// Checks u0(x_left) = u0(x_right) = 0 and r >= 0 on a grid of
/// `samples` points. Returns the first violation found.
std::optional<Violation> validate(const ProblemSpec& spec, std::size_t samples = 1001);

/// Reaction-diffusion problem on (-1, 1): r = 5x + 6,
/// f = exp(-4t) - cos(x + t)^4, u0 = sin(pi (1 + x) / 2), T = 1.
ProblemSpec builtin_test_problem();

/// Same operator as builtin_test_problem with u = exp(-t) sin(pi (1 + x) / 2)
/// and the source that makes it exact.
ProblemSpec manufactured_problem();

/// f = 0, u0 = 0.
ProblemSpec zero_problem();

std::vector<std::string> builtin_problem_names();
ProblemSpec builtin_problem(std::string_view name);

/// Builds a problem from a JSON object. Either {"problem": "<builtin>"}
/// (optionally with overrides such as "horizon" or "greens"), or a full
/// description where coefficients are {"kind": ..., params...} objects.
ProblemSpec problem_from_json(const nlohmann::json& config);
ProblemSpec load_problem(const std::string& path);

}  // namespace eemax
