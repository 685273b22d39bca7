#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "eemax/elliptic_estimator.hpp"
#include "eemax/experiment.hpp"
#include "eemax/parabolic_estimator.hpp"
#include "eemax/reference_oracle.hpp"

namespace py = pybind11;
using namespace eemax;

PYBIND11_MODULE(_eemax, m) {
  m.doc() = "Maximum-norm a posteriori error estimates for extrapolated Euler time stepping";

  py::class_<GreensBounds>(m, "GreensBounds")
      .def(py::init<double, double, double, double>(), py::arg("kappa0"), py::arg("kappa1"),
           py::arg("kappa1_prime"), py::arg("gamma"))
      .def_property_readonly("kappa0", &GreensBounds::kappa0)
      .def_property_readonly("kappa1", &GreensBounds::kappa1)
      .def_property_readonly("kappa1_prime", &GreensBounds::kappa1_prime)
      .def_property_readonly("gamma", &GreensBounds::gamma);

  py::class_<ProblemSpec>(m, "Problem")
      .def_readonly("name", &ProblemSpec::name)
      .def_readonly("x_left", &ProblemSpec::x_left)
      .def_readonly("x_right", &ProblemSpec::x_right)
      .def_readonly("diffusion", &ProblemSpec::diffusion)
      .def_readonly("horizon", &ProblemSpec::horizon)
      .def_readonly("greens", &ProblemSpec::greens)
      .def("reaction", [](const ProblemSpec& p, double x) { return p.reaction(x); })
      .def("source", [](const ProblemSpec& p, double x, double t) { return p.source(x, t); })
      .def("initial", [](const ProblemSpec& p, double x) { return p.initial(x); })
      .def_property_readonly("has_exact", [](const ProblemSpec& p) { return p.exact.has_value(); })
      .def("exact", [](const ProblemSpec& p, double x, double t) {
        if (!p.exact) throw py::value_error("problem has no closed-form solution");
        return (*p.exact)(x, t);
      })
      .def("validate", [](const ProblemSpec& p) -> std::optional<std::pair<std::string, double>> {
        if (auto v = validate(p)) return std::make_pair(v->what, v->x);
        return std::nullopt;
      });

  m.def("builtin_problem", &builtin_problem, py::arg("name"));
  m.def("builtin_problem_names", &builtin_problem_names);
  m.def("problem_from_json", [](const std::string& text) { return problem_from_json(nlohmann::json::parse(text)); },
        py::arg("text"));
  m.def("load_problem", &load_problem, py::arg("path"));

  py::class_<SpatialMesh, std::shared_ptr<SpatialMesh>>(m, "Mesh")
      .def(py::init<std::vector<double>>(), py::arg("nodes"))
      .def_static("uniform", [](double a, double b, std::size_t n) { return std::make_shared<SpatialMesh>(SpatialMesh::uniform(a, b, n)); },
                  py::arg("x_left"), py::arg("x_right"), py::arg("elements"))
      .def_property_readonly("elements", &SpatialMesh::elements)
      .def_property_readonly("nodes", [](const SpatialMesh& s) { return std::vector<double>(s.nodes().begin(), s.nodes().end()); })
      .def_property_readonly("max_width", &SpatialMesh::max_width);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<std::vector<double>>(), py::arg("times"))
      .def_static("uniform", &TimeGrid::uniform, py::arg("horizon"), py::arg("steps"))
      .def_property_readonly("steps", &TimeGrid::steps)
      .def_property_readonly("horizon", &TimeGrid::horizon)
      .def_property_readonly("times", [](const TimeGrid& g) { return std::vector<double>(g.times().begin(), g.times().end()); });

  py::class_<NodalField>(m, "Field")
      .def_readonly("values", &NodalField::values)
      .def("__call__", &NodalField::operator(), py::arg("x"))
      .def("sup_norm", [](const NodalField& f) { return sup_norm(f); });

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("v", &Trajectory::v)
      .def_readonly("w", &Trajectory::w)
      .def_readonly("u", &Trajectory::u)
      .def_property_readonly("steps", &Trajectory::steps)
      .def_property_readonly("final", [](const Trajectory& t) { return t.u.back(); });

  py::enum_<InitialApproximation>(m, "InitialApproximation")
      .value("INTERPOLATION", InitialApproximation::Interpolation)
      .value("L2_PROJECTION", InitialApproximation::L2Projection);
  py::enum_<EtaFMode>(m, "EtaFMode")
      .value("SIMPSON_PAPER", EtaFMode::SimpsonPaper)
      .value("QUADRATURE", EtaFMode::Quadrature);
  py::enum_<SplitPolicy>(m, "SplitPolicy").value("LAST", SplitPolicy::Last).value("SWEEP", SplitPolicy::Sweep);

  m.def(
      "solve",
      [](const ProblemSpec& spec, std::shared_ptr<SpatialMesh> mesh, const TimeGrid& grid, InitialApproximation mode) {
        return run(spec, mesh, grid, mode);
      },
      py::arg("problem"), py::arg("mesh"), py::arg("grid"), py::arg("initial") = InitialApproximation::Interpolation);

  py::class_<GreenWeights>(m, "GreenWeights")
      .def_readonly("sigma", &GreenWeights::sigma)
      .def_readonly("mu", &GreenWeights::mu)
      .def_readonly("chi", &GreenWeights::chi);
  m.def("compute_weights", &compute_weights, py::arg("grid"), py::arg("greens"));

  py::class_<EstimatorBreakdown>(m, "Breakdown")
      .def_readonly("total", &EstimatorBreakdown::total)
      .def_readonly("init_term", &EstimatorBreakdown::init_term)
      .def_readonly("F_term", &EstimatorBreakdown::F_term)
      .def_readonly("eta_ell_MK", &EstimatorBreakdown::eta_ell_MK)
      .def_readonly("dpsi_term", &EstimatorBreakdown::dpsi_term)
      .def_readonly("zh_term", &EstimatorBreakdown::zh_term)
      .def_readonly("split", &EstimatorBreakdown::split)
      .def_readonly("eta_init", &EstimatorBreakdown::eta_init)
      .def_readonly("eta_F", &EstimatorBreakdown::eta_F)
      .def_readonly("eta_ell", &EstimatorBreakdown::eta_ell)
      .def_readonly("eta_ell_delta", &EstimatorBreakdown::eta_ell_delta)
      .def_readonly("eta_dpsi", &EstimatorBreakdown::eta_dpsi)
      .def_readonly("eta_zh", &EstimatorBreakdown::eta_zh)
      .def_readonly("weights", &EstimatorBreakdown::weights)
      .def("recompute_total", &EstimatorBreakdown::recompute_total);

  m.def(
      "estimate",
      [](const ProblemSpec& spec, const TimeGrid& grid, const Trajectory& traj, const std::string& estimator,
         std::optional<std::size_t> split, EtaFMode mode, std::size_t samples) {
        EstimatorOptions options;
        options.split = split;
        options.eta_f_mode = mode;
        options.samples = samples;
        return estimate(spec, grid, traj, *make_estimator(estimator, spec, samples), options);
      },
      py::arg("problem"), py::arg("grid"), py::arg("trajectory"), py::arg("estimator") = "residual-1d",
      py::arg("split") = py::none(), py::arg("eta_f_mode") = EtaFMode::SimpsonPaper,
      py::arg("samples") = kDefaultSamplesPerElement);

  py::register_exception<OracleFailure>(m, "OracleFailure", PyExc_RuntimeError);
  py::class_<ReferenceSolution>(m, "Reference")
      .def_readonly("values", &ReferenceSolution::values)
      .def_readonly("accuracy", &ReferenceSolution::accuracy)
      .def_readonly("steps", &ReferenceSolution::steps)
      .def_property_readonly("nodes", [](const ReferenceSolution& r) {
        return std::vector<double>(r.mesh->nodes().begin(), r.mesh->nodes().end());
      });
  m.def(
      "solve_reference",
      [](const ProblemSpec& spec, double tol, std::size_t elements, std::size_t steps, std::size_t sample_elements,
         const std::string& cache_dir) {
        OracleOptions o;
        o.tol = tol;
        o.elements = elements;
        o.steps = steps;
        o.sample_elements = sample_elements;
        o.cache_dir = cache_dir;
        py::gil_scoped_release release;
        return solve_reference(spec, o);
      },
      py::arg("problem"), py::arg("tol") = 1e-9, py::arg("elements") = 1024, py::arg("steps") = 256,
      py::arg("sample_elements") = 8192, py::arg("cache_dir") = "");
  m.def("error_at_T", &error_at_T, py::arg("approximation"), py::arg("reference"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("problem", &RunConfig::problem)
      .def_readwrite("problem_file", &RunConfig::problem_file)
      .def_readwrite("m_values", &RunConfig::m_values)
      .def_readwrite("split_policy", &RunConfig::split_policy)
      .def_readwrite("estimator", &RunConfig::estimator)
      .def_readwrite("eta_f_mode", &RunConfig::eta_f_mode)
      .def_readwrite("initial", &RunConfig::initial)
      .def_readwrite("oracle_tol", &RunConfig::oracle_tol)
      .def_readwrite("samples", &RunConfig::samples)
      .def_readwrite("workers", &RunConfig::workers)
      .def_readwrite("out_dir", &RunConfig::out_dir)
      .def_readwrite("cache_dir", &RunConfig::cache_dir)
      .def_readwrite("reciprocal_efficiency", &RunConfig::reciprocal_efficiency)
      .def("validate", &RunConfig::validate);

  py::class_<RunRecord>(m, "RunRecord")
      .def_readonly("M", &RunRecord::M)
      .def_readonly("elements", &RunRecord::elements)
      .def_readonly("e_M", &RunRecord::e_M)
      .def_readonly("p_M", &RunRecord::p_M)
      .def_readonly("eta", &RunRecord::eta)
      .def_readonly("eta_order", &RunRecord::eta_order)
      .def_readonly("chi_M", &RunRecord::chi_M)
      .def_readonly("eta_init", &RunRecord::eta_init)
      .def_readonly("eta_F", &RunRecord::eta_F)
      .def_readonly("eta_ell_MK", &RunRecord::eta_ell_MK)
      .def_readonly("eta_dpsi", &RunRecord::eta_dpsi)
      .def_readonly("eta_zh", &RunRecord::eta_zh)
      .def_readonly("K", &RunRecord::K)
      .def_readonly("best_K", &RunRecord::best_K)
      .def_readonly("best_eta", &RunRecord::best_eta)
      .def_readonly("failure", &RunRecord::failure)
      .def_property_readonly("ok", &RunRecord::ok);

  m.def(
      "run_matrix",
      [](const RunConfig& config) {
        py::gil_scoped_release release;
        return run_matrix(config);
      },
      py::arg("config"));
  m.def(
      "emit_tables",
      [](const std::vector<RunRecord>& records, const std::string& out_dir, bool reciprocal) {
        const auto f = emit_tables(records, out_dir, reciprocal);
        return py::dict(py::arg("table1_csv") = f.table1_csv, py::arg("table2_csv") = f.table2_csv,
                        py::arg("table1_txt") = f.table1_txt, py::arg("table2_txt") = f.table2_txt,
                        py::arg("metadata_json") = f.metadata_json);
      },
      py::arg("records"), py::arg("out_dir"), py::arg("reciprocal_efficiency") = false);
  m.def("table1_csv", &table1_csv);
  m.def("table2_csv", &table2_csv);
}
