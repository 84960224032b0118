#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sisnet/harness.hpp"

namespace py = pybind11;
using namespace sisnet;

PYBIND11_MODULE(_sisnet, m) {
    m.doc() = "SIS spread over time-varying weighted networks: exact chain, "
              "mean-field, stochastic and stability tooling";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<PreconditionViolated>(m, "PreconditionViolated", PyExc_RuntimeError);

    py::enum_<Topology>(m, "Topology")
        .value("Line", Topology::Line)
        .value("Star", Topology::Star)
        .value("Complete", Topology::Complete);

    m.def("static_topology", &static_topology, py::arg("kind"), py::arg("n"));
    m.def("proximity_weights", &proximity_weights, py::arg("positions"), py::arg("radius"));

    py::class_<GraphTrajectory>(m, "GraphTrajectory")
        .def_static("constant", &GraphTrajectory::constant)
        .def_static("piecewise", &GraphTrajectory::piecewise)
        .def_static("from_function", &GraphTrajectory::from_function, py::arg("f"), py::arg("n"),
                    py::arg("symmetric") = true)
        .def("sample", &GraphTrajectory::sample)
        .def_property_readonly("agents", &GraphTrajectory::agents)
        .def_property_readonly("is_static", &GraphTrajectory::is_static);

    py::class_<VirusParams>(m, "VirusParams")
        .def(py::init<>())
        .def_static("homogeneous", &VirusParams::homogeneous, py::arg("n"), py::arg("beta"),
                    py::arg("delta"))
        .def_readwrite("beta", &VirusParams::beta)
        .def_readwrite("delta", &VirusParams::delta);

    py::class_<MfTrajectory>(m, "MfTrajectory")
        .def_readonly("times", &MfTrajectory::times)
        .def_readonly("states", &MfTrajectory::states)
        .def_readonly("early_stop_time", &MfTrajectory::early_stop_time);
    m.def(
        "integrate_mf",
        [](const Vector& p0, const GraphTrajectory& traj, const VirusParams& params,
           double horizon, const std::vector<double>& samples) {
            return integrate_mf(p0, traj, params, horizon, samples);
        },
        py::arg("p0"), py::arg("trajectory"), py::arg("params"), py::arg("horizon"),
        py::arg("sample_times"));
    m.def("ndfe_complete_analytic", &ndfe_complete_analytic, py::arg("n"), py::arg("beta"),
          py::arg("delta"));

    py::class_<ChainTrajectory>(m, "ChainTrajectory")
        .def_readonly("times", &ChainTrajectory::times)
        .def_readonly("states", &ChainTrajectory::states)
        .def_readonly("early_stop_time", &ChainTrajectory::early_stop_time);
    m.def(
        "integrate_chain",
        [](const Vector& y0, const GraphTrajectory& traj, double beta, double delta,
           double horizon, const std::vector<double>& samples) {
            return integrate_chain(y0, traj, beta, delta, horizon, samples);
        },
        py::arg("y0"), py::arg("trajectory"), py::arg("beta"), py::arg("delta"),
        py::arg("horizon"), py::arg("sample_times"));
    m.def("point_mass_from_bits", &point_mass_from_bits, py::arg("bits"));
    m.def("marginals", &marginals, py::arg("y"), py::arg("n"));

    py::class_<SpectralTrace>(m, "SpectralTrace")
        .def_readonly("times", &SpectralTrace::times)
        .def_readonly("values", &SpectralTrace::values)
        .def("max_value", &SpectralTrace::max_value);
    py::class_<StabilityCertificate>(m, "StabilityCertificate")
        .def_property_readonly("verdict",
                               [](const StabilityCertificate& c) { return to_string(c.verdict); })
        .def_readonly("condition", &StabilityCertificate::condition)
        .def_readonly("scalars", &StabilityCertificate::scalars)
        .def("to_json", &StabilityCertificate::to_json);
    m.def("uniform_grid", &uniform_grid, py::arg("t0"), py::arg("t1"), py::arg("points"));
    m.def("spectral_trace", &spectral_trace, py::arg("trajectory"), py::arg("params"),
          py::arg("grid"));
    m.def("check_theorem1", &check_theorem1, py::arg("trajectory"), py::arg("params"),
          py::arg("grid"));
    m.def("check_theorem2", &check_theorem2, py::arg("trajectory"), py::arg("params"),
          py::arg("grid"), py::arg("window"), py::arg("alpha"));
    m.def("lyapunov_solve", &lyapunov_solve, py::arg("m"));

    py::class_<ComparisonRecord>(m, "ComparisonRecord")
        .def_readonly("n", &ComparisonRecord::n)
        .def_readonly("beta", &ComparisonRecord::beta)
        .def_readonly("delta", &ComparisonRecord::delta)
        .def_readonly("init_label", &ComparisonRecord::init_label)
        .def_readonly("error", &ComparisonRecord::error)
        .def_readonly("sum_p", &ComparisonRecord::sum_p)
        .def_readonly("sum_v", &ComparisonRecord::sum_v)
        .def_readonly("aggregate_infected", &ComparisonRecord::aggregate_infected)
        .def_readonly("flag", &ComparisonRecord::flag)
        .def("to_json", &ComparisonRecord::to_json);
    m.def("run_table_suite", &run_table_suite, py::arg("which"));
    m.def("table_csv", &table_csv, py::arg("records"), py::arg("which"));

    m.def("parse_scenario", &parse_scenario, py::arg("text"));
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("run_scenario_to_files",
          [](const Scenario& sc) { return run_scenario_to_files(sc); });
    py::class_<Scenario>(m, "Scenario")
        .def_readonly("id", &Scenario::id)
        .def_property_readonly("agents", &Scenario::agents);
}
