#include "eemax/reference_oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace eemax {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

constexpr std::array<char, 8> kMagic = {'E', 'E', 'M', 'X', 'R', 'E', 'F', '\0'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) return false;
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  std::memcpy(&value, bytes.data(), sizeof(T));
  return true;
}

std::vector<double> richardson(const std::vector<double>& coarse, const std::vector<double>& fine,
                               double factor) {
  std::vector<double> out(coarse.size());
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    out[i] = (factor * fine[i] - coarse[i]) / (factor - 1.0);
  }
  return out;
}

/// Values of a uniform 2N-element field at the nodes of the N-element mesh.
std::vector<double> restrict_to_coarse(const std::vector<double>& fine) {
  std::vector<double> out((fine.size() + 1) / 2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fine[2 * i];
  return out;
}

class OracleLevels {
 public:
  explicit OracleLevels(const ProblemSpec& spec) : spec_(spec) {}

  const std::vector<double>& cn(std::size_t elements, std::size_t steps) {
    const auto key = std::make_pair(elements, steps);
    auto it = runs_.find(key);
    if (it == runs_.end()) {
      const auto mesh = SpatialMesh::uniform(spec_.x_left, spec_.x_right, elements);
      it = runs_.emplace(key, crank_nicolson(spec_, mesh, steps)).first;
    }
    return it->second;
  }

  /// Time-extrapolated values on the mesh with `elements` elements.
  std::vector<double> time_level(std::size_t elements, std::size_t steps) {
    return richardson(cn(elements, steps), cn(elements, 2 * steps), 4.0);
  }

  /// Time- and space-extrapolated values on the mesh with `elements` elements.
  std::vector<double> level(std::size_t elements, std::size_t steps) {
    const auto coarse = time_level(elements, steps);
    const auto fine = restrict_to_coarse(time_level(2 * elements, steps));
    return richardson(coarse, fine, 4.0);
  }

 private:
  const ProblemSpec& spec_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> runs_;
};

}  // namespace

std::vector<double> crank_nicolson(const ProblemSpec& spec, const SpatialMesh& mesh,
                                   std::size_t steps) {
  if (steps < 2) throw std::invalid_argument("Crank-Nicolson needs at least two steps");
  const auto mass = assemble_mass(mesh);
  const auto stiff = assemble_stiffness(mesh, spec.diffusion, spec.reaction);
  const double tau = spec.horizon / static_cast<double>(steps);
  auto load = [&](double t) {
    return assemble_load(mesh, [&](double x) { return spec.source(x, t); });
  };

  std::vector<double> u(mesh.interior_count());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = spec.initial(mesh.node(i + 1));

  // start-up: four implicit Euler steps over [0, 2 tau]
  const double k = 0.5 * tau;
  const auto euler = mass.plus_scaled(k, stiff);
  for (std::size_t s = 1; s <= 4; ++s) {
    auto rhs = mass.apply(u);
    const auto f = load(k * static_cast<double>(s));
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += k * f[i];
    u = solve_tridiagonal(euler, rhs);
  }

  const auto implicit_part = mass.plus_scaled(0.5 * tau, stiff);
  const auto explicit_part = mass.plus_scaled(-0.5 * tau, stiff);
  auto f_old = load(2.0 * tau);
  for (std::size_t n = 2; n < steps; ++n) {
    const double t_new = spec.horizon * static_cast<double>(n + 1) / static_cast<double>(steps);
    const auto f_new = load(t_new);
    auto rhs = explicit_part.apply(u);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += 0.5 * tau * (f_old[i] + f_new[i]);
    u = solve_tridiagonal(implicit_part, rhs);
    f_old = f_new;
  }

  std::vector<double> out(mesh.node_count(), 0.0);
  std::copy(u.begin(), u.end(), out.begin() + 1);
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::uint64_t cache_hash(const ProblemSpec& spec, const OracleOptions& options) {
  std::ostringstream key;
  key.precision(17);
  key << spec.fingerprint << '|' << options.tol << '|' << options.elements << '|' << options.steps
      << '|' << options.sample_elements << '|' << options.max_refinements;
  return fnv1a64(key.str());
}

}  // namespace

std::string reference_cache_key(const ProblemSpec& spec, const OracleOptions& options) {
  std::ostringstream name;
  name << "ref-" << std::hex << cache_hash(spec, options) << ".bin";
  return name.str();
}

void write_reference(const std::string& path, const ReferenceSolution& ref, std::uint64_t key) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write reference cache '" + path + "'");
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCacheVersion);
  put_le<std::uint32_t>(out, 0);
  put_le<std::uint64_t>(out, key);
  put_le<std::uint64_t>(out, ref.values.size());
  put_le<std::uint64_t>(out, ref.steps);
  put_le<double>(out, ref.mesh->x_left());
  put_le<double>(out, ref.mesh->x_right());
  put_le<double>(out, ref.accuracy);
  put_le<double>(out, ref.tol);
  for (double v : ref.values) put_le<double>(out, v);
  if (!out) throw std::runtime_error("failed writing reference cache '" + path + "'");
}

std::optional<ReferenceSolution> read_reference(const std::string& path, std::uint64_t key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) return std::nullopt;
  std::uint32_t version = 0;
  std::uint32_t reserved = 0;
  std::uint64_t stored_key = 0;
  std::uint64_t count = 0;
  std::uint64_t steps = 0;
  double xl = 0.0, xr = 0.0, accuracy = 0.0, tol = 0.0;
  if (!get_le(in, version) || version != kCacheVersion || !get_le(in, reserved) ||
      !get_le(in, stored_key) || stored_key != key || !get_le(in, count) || count < 3 ||
      !get_le(in, steps) || !get_le(in, xl) || !get_le(in, xr) || !get_le(in, accuracy) ||
      !get_le(in, tol)) {
    return std::nullopt;
  }
  ReferenceSolution ref;
  ref.values.resize(count);
  for (double& v : ref.values) {
    if (!get_le(in, v)) return std::nullopt;
  }
  ref.mesh = std::make_shared<const SpatialMesh>(SpatialMesh::uniform(xl, xr, count - 1));
  ref.accuracy = accuracy;
  ref.tol = tol;
  ref.steps = steps;
  return ref;
}

double lagrange5(const SpatialMesh& mesh, std::span<const double> values, double x) {
  constexpr std::size_t kPoints = 6;
  const std::size_t n = mesh.node_count();
  if (n < kPoints) throw std::invalid_argument("interpolation needs at least six nodes");
  const std::size_t e = mesh.locate(x);
  const std::size_t first = std::min(e >= 2 ? e - 2 : 0, n - kPoints);
  double sum = 0.0;
  for (std::size_t a = first; a < first + kPoints; ++a) {
    double weight = 1.0;
    for (std::size_t b = first; b < first + kPoints; ++b) {
      if (b != a) weight *= (x - mesh.node(b)) / (mesh.node(a) - mesh.node(b));
    }
    sum += weight * values[a];
  }
  return sum;
}

ReferenceSolution solve_reference(const ProblemSpec& spec, const OracleOptions& options) {
  if (!(options.tol >= 1e-11)) throw std::invalid_argument("oracle tolerance below 1e-11");
  if (options.elements < 8 || options.steps < 2) {
    throw std::invalid_argument("oracle needs at least eight elements and two steps");
  }
  if (options.sample_elements == 0 || options.sample_elements % options.elements != 0) {
    throw std::invalid_argument("sampling grid must refine the computational mesh");
  }
  const std::uint64_t key = cache_hash(spec, options);
  std::filesystem::path cache_path;
  if (!options.cache_dir.empty()) {
    cache_path = std::filesystem::path(options.cache_dir) / reference_cache_key(spec, options);
    if (auto cached = read_reference(cache_path.string(), key)) return *std::move(cached);
  }

  OracleLevels levels(spec);
  std::size_t elements = options.elements;
  std::size_t steps = options.steps;
  double accuracy = 0.0;
  for (std::size_t attempt = 0;; ++attempt) {
    auto current = levels.level(elements, steps);
    const auto next = restrict_to_coarse(levels.level(2 * elements, 2 * steps));
    accuracy = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      accuracy = std::max(accuracy, std::abs(current[i] - next[i]));
    }
    if (accuracy <= options.tol) {
      const auto compute_mesh = SpatialMesh::uniform(spec.x_left, spec.x_right, elements);
      ReferenceSolution ref;
      ref.mesh = std::make_shared<const SpatialMesh>(
          SpatialMesh::uniform(spec.x_left, spec.x_right, std::max(options.sample_elements, elements)));
      ref.values.resize(ref.mesh->node_count());
      for (std::size_t i = 0; i < ref.values.size(); ++i) {
        ref.values[i] = lagrange5(compute_mesh, current, ref.mesh->node(i));
      }
      ref.values.front() = 0.0;
      ref.values.back() = 0.0;
      ref.accuracy = accuracy;
      ref.tol = options.tol;
      ref.steps = steps;
      if (!cache_path.empty()) {
        std::filesystem::create_directories(cache_path.parent_path());
        write_reference(cache_path.string(), ref, key);
      }
      return ref;
    }
    if (attempt == options.max_refinements) break;
    elements *= 2;
    steps *= 2;
  }
  std::ostringstream msg;
  msg << "reference oracle for '" << spec.name << "' reached accuracy " << accuracy
      << " > tol " << options.tol << " after " << options.max_refinements << " refinements";
  throw OracleFailure(msg.str());
}

double error_at_T(const NodalField& approximation, const ReferenceSolution& reference) {
  const SpatialMesh& coarse = *approximation.mesh;
  const SpatialMesh& fine = *reference.mesh;
  if (std::abs(coarse.x_left() - fine.x_left()) > 1e-14 ||
      std::abs(coarse.x_right() - fine.x_right()) > 1e-14) {
    throw std::invalid_argument("approximation and reference live on different domains");
  }
  double err = 0.0;
  std::size_t e = 0;
  for (std::size_t i = 0; i < fine.node_count(); ++i) {
    const double x = fine.node(i);
    while (e + 1 < coarse.elements() && x > coarse.node(e + 1)) ++e;
    const double s = std::clamp((x - coarse.node(e)) / coarse.width(e), 0.0, 1.0);
    err = std::max(err, std::abs(approximation.at_local(e, s) - reference.values[i]));
  }
  return err;
}

}  // namespace eemax
