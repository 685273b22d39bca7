#include "eemax/problem.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace eemax {

namespace {

using nlohmann::json;

double param(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

double param(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw std::invalid_argument("missing parameter '" + std::string(key) + "' in " + j.dump());
  }
  return j.at(key).get<double>();
}

SpaceFunction make_reaction(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    const double c = param(j, "value");
    return [c](double) { return c; };
  }
  if (kind == "affine") {
    const double a = param(j, "a");
    const double b = param(j, "b");
    return [a, b](double x) { return a * x + b; };
  }
  throw std::invalid_argument("unknown reaction kind '" + kind + "'");
}

SpaceFunction make_initial(const json& j, double xl, double xr) {
  const auto kind = j.at("kind").get<std::string>();
  const double length = xr - xl;
  if (kind == "zero") {
    return [](double) { return 0.0; };
  }
  if (kind == "constant") {
    const double c = param(j, "value");
    return [c](double) { return c; };
  }
  if (kind == "sine-arch") {
    const double amp = param(j, "amplitude", 1.0);
    return [=](double x) { return amp * std::sin(std::numbers::pi * (x - xl) / length); };
  }
  if (kind == "bubble") {
    const double amp = param(j, "amplitude", 1.0);
    return [=](double x) { return amp * 4.0 * (x - xl) * (xr - x) / (length * length); };
  }
  throw std::invalid_argument("unknown initial kind '" + kind + "'");
}

SpaceTimeFunction make_source(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "zero") {
    return [](double, double) { return 0.0; };
  }
  if (kind == "constant") {
    const double c = param(j, "value");
    return [c](double, double) { return c; };
  }
  if (kind == "exp-cos4") {
    const double decay = param(j, "decay", 4.0);
    return [decay](double x, double t) {
      const double c = std::cos(x + t);
      return std::exp(-decay * t) - c * c * c * c;
    };
  }
  if (kind == "time-polynomial") {
    const auto coeffs = j.at("coefficients").get<std::vector<double>>();
    return [coeffs](double, double t) {
      double acc = 0.0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
      return acc;
    };
  }
  throw std::invalid_argument("unknown source kind '" + kind + "'");
}

GreensBounds make_greens(const json& j) {
  return GreensBounds(param(j, "kappa0"), param(j, "kappa1"), param(j, "kappa1_prime", 0.0),
                      param(j, "gamma"));
}

GreensBounds test_problem_greens() { return GreensBounds(1.0, 3.0 / std::pow(2.0, 1.5), 0.0, 0.5); }

}  // namespace

GreensBounds::GreensBounds(double kappa0, double kappa1, double kappa1_prime, double gamma)
    : kappa0_(kappa0), kappa1_(kappa1), kappa1_prime_(kappa1_prime), gamma_(gamma) {
  for (double v : {kappa0, kappa1, kappa1_prime, gamma}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("Green's bound constants must be finite and non-negative");
    }
  }
}

double GreensBounds::phi0(double t) const { return kappa0_ * std::exp(-gamma_ * t); }

double GreensBounds::phi1(double t) const {
  return (kappa1_ / t + kappa1_prime_) * std::exp(-gamma_ * t);
}

std::optional<Violation> validate(const ProblemSpec& spec, std::size_t samples) {
  if (!(spec.x_left < spec.x_right)) return Violation{"empty domain", spec.x_left};
  if (!(spec.diffusion > 0.0)) return Violation{"diffusion must be positive", spec.x_left};
  if (!(spec.horizon > 0.0)) return Violation{"horizon must be positive", spec.x_left};
  if (!spec.reaction || !spec.source || !spec.initial) {
    return Violation{"coefficient function missing", spec.x_left};
  }
  constexpr double boundary_tol = 1e-12;
  if (std::abs(spec.initial(spec.x_left)) > boundary_tol) {
    return Violation{"initial data does not vanish at the boundary", spec.x_left};
  }
  if (std::abs(spec.initial(spec.x_right)) > boundary_tol) {
    return Violation{"initial data does not vanish at the boundary", spec.x_right};
  }
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = spec.x_left + spec.length() * static_cast<double>(i) /
                                       static_cast<double>(samples - 1);
    const double r = spec.reaction(x);
    if (!(r >= 0.0)) {
      std::ostringstream msg;
      msg << "negative reaction coefficient r = " << r;
      return Violation{msg.str(), x};
    }
  }
  return std::nullopt;
}

ProblemSpec builtin_test_problem() {
  return problem_from_json(json{
      {"domain", {-1.0, 1.0}},
      {"diffusion", 1.0},
      {"reaction", {{"kind", "affine"}, {"a", 5.0}, {"b", 6.0}}},
      {"source", {{"kind", "exp-cos4"}, {"decay", 4.0}}},
      {"initial", {{"kind", "sine-arch"}, {"amplitude", 1.0}}},
      {"horizon", 1.0},
      {"greens",
       {{"kappa0", 1.0}, {"kappa1", 3.0 / std::pow(2.0, 1.5)}, {"kappa1_prime", 0.0}, {"gamma", 0.5}}},
      {"name", "paper-sect4"}});
}

ProblemSpec manufactured_problem() {
  ProblemSpec spec;
  spec.name = "manufactured";
  spec.x_left = -1.0;
  spec.x_right = 1.0;
  spec.diffusion = 1.0;
  spec.reaction = [](double x) { return 5.0 * x + 6.0; };
  spec.horizon = 1.0;
  spec.greens = test_problem_greens();
  constexpr double k = std::numbers::pi / 2.0;
  spec.exact = [](double x, double t) { return std::exp(-t) * std::sin(k * (1.0 + x)); };
  spec.initial = [](double x) { return std::sin(k * (1.0 + x)); };
  const double eps = spec.diffusion;
  // u_t - eps u'' + r u with u_t = -u and u'' = -k^2 u
  spec.source = [eps](double x, double t) {
    const double u = std::exp(-t) * std::sin(k * (1.0 + x));
    return (-1.0 + eps * k * k + 5.0 * x + 6.0) * u;
  };
  spec.fingerprint = "builtin:manufactured";
  return spec;
}

ProblemSpec zero_problem() {
  ProblemSpec spec = problem_from_json(json{{"domain", {-1.0, 1.0}},
                                            {"diffusion", 1.0},
                                            {"reaction", {{"kind", "affine"}, {"a", 5.0}, {"b", 6.0}}},
                                            {"source", {{"kind", "zero"}}},
                                            {"initial", {{"kind", "zero"}}},
                                            {"horizon", 1.0},
                                            {"greens",
                                             {{"kappa0", 1.0},
                                              {"kappa1", 3.0 / std::pow(2.0, 1.5)},
                                              {"kappa1_prime", 0.0},
                                              {"gamma", 0.5}}},
                                            {"name", "zero"}});
  spec.exact = [](double, double) { return 0.0; };
  return spec;
}

std::vector<std::string> builtin_problem_names() { return {"paper-sect4", "manufactured", "zero"}; }

ProblemSpec builtin_problem(std::string_view name) {
  if (name == "paper-sect4") return builtin_test_problem();
  if (name == "manufactured") return manufactured_problem();
  if (name == "zero") return zero_problem();
  throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

ProblemSpec problem_from_json(const nlohmann::json& config) {
  if (config.contains("problem")) {
    ProblemSpec spec = builtin_problem(config.at("problem").get<std::string>());
    if (config.contains("horizon")) spec.horizon = config.at("horizon").get<double>();
    if (config.contains("greens")) spec.greens = make_greens(config.at("greens"));
    spec.fingerprint = config.dump();
    return spec;
  }
  ProblemSpec spec;
  const auto domain = config.at("domain").get<std::vector<double>>();
  if (domain.size() != 2) throw std::invalid_argument("domain must be [x_left, x_right]");
  spec.x_left = domain[0];
  spec.x_right = domain[1];
  if (!(spec.x_left < spec.x_right)) throw std::invalid_argument("domain must satisfy x_left < x_right");
  spec.diffusion = config.value("diffusion", 1.0);
  if (!(spec.diffusion > 0.0)) throw std::invalid_argument("diffusion must be positive");
  spec.horizon = config.value("horizon", 1.0);
  if (!(spec.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  spec.reaction = make_reaction(config.at("reaction"));
  spec.source = make_source(config.at("source"));
  spec.initial = make_initial(config.at("initial"), spec.x_left, spec.x_right);
  spec.greens = make_greens(config.at("greens"));
  spec.name = config.value("name", std::string("custom"));
  spec.fingerprint = config.dump();
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed problem file '" + path + "': " + e.what());
  }
  return problem_from_json(config);
}

}  // namespace eemax
