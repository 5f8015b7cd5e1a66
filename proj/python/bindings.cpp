#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mimodf/cli.hpp"
#include "mimodf/inversion.hpp"
#include "mimodf/mgf.hpp"
#include "mimodf/montecarlo.hpp"
#include "mimodf/protocol.hpp"

namespace py = pybind11;
using namespace mimodf;

namespace {

ProtocolKind kind_arg(const std::string& s) { return parse_protocol(s); }
PowerConstraint constraint_arg(const std::string& s) { return parse_constraint(s); }

QuadratureConfig quad_from(int nodes, double abscissa_scale, std::optional<double> abscissa)
{
    QuadratureConfig q;
    q.nodes = nodes;
    q.abscissa_scale = abscissa_scale;
    q.abscissa = abscissa;
    return q;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "CROC analysis of MIMO reporting channels for distributed detection";

    py::register_exception<UnsupportedClosedForm>(m, "UnsupportedClosedForm", PyExc_ValueError);
    py::register_exception<PoleError>(m, "PoleError", PyExc_ArithmeticError);
    py::register_exception<QuadratureDivergence>(m, "QuadratureDivergence", PyExc_RuntimeError);
    py::register_exception<NoFeasibleThreshold>(m, "NoFeasibleThreshold", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<LocalSensor>(m, "LocalSensor")
        .def(py::init([](double p_f, double p_d, double p_0) {
                 LocalSensor s{p_f, p_d, p_0, 1 - p_0};
                 s.validate();
                 return s;
             }),
             py::arg("p_f") = 0.05, py::arg("p_d") = 0.5, py::arg("p_0") = 0.5)
        .def_readonly("p_f", &LocalSensor::p_f)
        .def_readonly("p_d", &LocalSensor::p_d)
        .def_readonly("p_0", &LocalSensor::p_0)
        .def_readonly("p_1", &LocalSensor::p_1);

    py::class_<ProtocolScenario>(m, "Scenario")
        .def_property_readonly("protocol", [](const ProtocolScenario& s) { return std::string(to_string(s.kind)); })
        .def_property_readonly("constraint",
                               [](const ProtocolScenario& s) { return std::string(to_string(s.constraint)); })
        .def_property_readonly("K", [](const ProtocolScenario& s) { return s.geometry.K; })
        .def_property_readonly("N", [](const ProtocolScenario& s) { return s.geometry.N; })
        .def_property_readonly("L", [](const ProtocolScenario& s) { return s.geometry.L; })
        .def_property_readonly("q", [](const ProtocolScenario& s) { return s.geometry.q; })
        .def_property_readonly("eta", [](const ProtocolScenario& s) { return s.geometry.eta; })
        .def_property_readonly("sigma_w2", [](const ProtocolScenario& s) { return s.noise.sigma_w2; })
        .def_readonly("alpha", &ProtocolScenario::alpha)
        .def_readonly("sigma_eff2", &ProtocolScenario::sigma_eff2)
        .def_readonly("sensor", &ProtocolScenario::sensor)
        .def("__repr__", [](const ProtocolScenario& s) { return "<Scenario " + s.label() + ">"; });

    m.def(
        "make_scenario",
        [](const std::string& protocol, int K, int N, double snr_db, const std::string& constraint,
           const LocalSensor& sensor) {
            return make_scenario(kind_arg(protocol), constraint_arg(constraint), K, N, db_to_linear(snr_db), sensor);
        },
        py::arg("protocol"), py::arg("K"), py::arg("N"), py::arg("snr_db"), py::arg("constraint") = "power",
        py::arg("sensor") = LocalSensor{});

    py::class_<CrocCurve>(m, "CrocCurve")
        .def_readonly("thresholds", &CrocCurve::thresholds)
        .def_readonly("q_f", &CrocCurve::q_f)
        .def_readonly("q_d", &CrocCurve::q_d)
        .def_property_readonly("q_m",
                               [](const CrocCurve& c) {
                                   std::vector<double> v(c.size());
                                   for (std::size_t i = 0; i < c.size(); ++i) v[i] = c.q_m(i);
                                   return v;
                               })
        .def_readonly("scenario", &CrocCurve::scenario)
        .def_property_readonly("engine", [](const CrocCurve& c) { return std::string(to_string(c.engine)); })
        .def_readonly("trials", &CrocCurve::trials)
        .def_readonly("nodes", &CrocCurve::nodes)
        .def("__len__", &CrocCurve::size)
        .def("q_m_at", [](const CrocCurve& c, double q_f) { return q_m_at(c, q_f); }, py::arg("q_f"));

    py::class_<MgfEvaluator>(m, "Mgf")
        .def(py::init([](const std::string& protocol, int K, int N, double sigma2, double p_plus,
                         std::optional<std::string> backend) {
                 const ProtocolKind kind = kind_arg(protocol);
                 MgfBackend be = preferred_backend(kind, K);
                 if (backend) {
                     if (*backend == "closed") be = MgfBackend::ClosedForm;
                     else if (*backend == "det") be = MgfBackend::Determinant;
                     else throw py::value_error("backend must be 'closed' or 'det'");
                 }
                 return MgfEvaluator(kind, K, N, sigma2, p_plus, be);
             }),
             py::arg("protocol"), py::arg("K"), py::arg("N"), py::arg("sigma2"), py::arg("p_plus"),
             py::arg("backend") = std::nullopt)
        .def("__call__", &MgfEvaluator::operator(), py::arg("s"))
        .def_property_readonly("poles", &MgfEvaluator::poles)
        .def_property_readonly("backend", [](const MgfEvaluator& e) { return std::string(to_string(e.backend())); })
        .def(
            "tail_probability",
            [](const MgfEvaluator& e, double gamma, int nodes, double abscissa_scale, std::optional<double> abscissa) {
                return tail_probability(e, gamma, quad_from(nodes, abscissa_scale, abscissa));
            },
            py::arg("gamma"), py::arg("nodes") = 500, py::arg("abscissa_scale") = 1.0,
            py::arg("abscissa") = std::nullopt);

    m.def(
        "analytic_croc",
        [](const ProtocolScenario& s, const std::vector<double>& thresholds, int nodes, double abscissa_scale,
           std::optional<std::string> backend, unsigned workers) {
            std::optional<MgfBackend> be;
            if (backend) {
                if (*backend == "closed") be = MgfBackend::ClosedForm;
                else if (*backend == "det") be = MgfBackend::Determinant;
                else throw py::value_error("backend must be 'closed' or 'det'");
            }
            py::gil_scoped_release release;
            return analytic_croc(s, thresholds, quad_from(nodes, abscissa_scale, std::nullopt), be, workers);
        },
        py::arg("scenario"), py::arg("thresholds"), py::arg("nodes") = 500, py::arg("abscissa_scale") = 1.0,
        py::arg("backend") = std::nullopt, py::arg("workers") = 1);

    m.def(
        "estimate_croc",
        [](const ProtocolScenario& s, const std::vector<double>& thresholds, long long trials, std::uint64_t seed,
           bool crn, unsigned workers) {
            McOptions o;
            o.trials = trials;
            o.seed.master = seed;
            o.common_random_numbers = crn;
            o.workers = workers;
            py::gil_scoped_release release;
            return estimate_croc(s, thresholds, o);
        },
        py::arg("scenario"), py::arg("thresholds"), py::arg("trials") = 100000, py::arg("seed") = SeedSpec{}.master,
        py::arg("common_random_numbers") = false, py::arg("workers") = 1);

    m.def(
        "default_threshold_grid",
        [](const ProtocolScenario& s, int points, std::uint64_t seed) {
            return default_threshold_grid(s, points, SeedSpec{seed});
        },
        py::arg("scenario"), py::arg("points") = 101, py::arg("seed") = SeedSpec{}.master);

    m.def(
        "observation_bound",
        [](int K, double p_f, double p_d) {
            std::vector<std::tuple<int, double, double>> out;
            for (const BoundPoint& b : observation_bound(K, p_f, p_d)) out.emplace_back(b.g, b.q_f, b.q_m);
            return out;
        },
        py::arg("K"), py::arg("p_f"), py::arg("p_d"), "List of (g, q_f, q_m) for the counting rule.");

    m.def(
        "neyman_pearson_threshold",
        [](const CrocCurve& c, double target) { return select_threshold(c, NeymanPearson{target}); },
        py::arg("curve"), py::arg("target_q_f"));
    m.def(
        "bayes_threshold", [](const CrocCurve& c, double p_0, double p_1) { return select_threshold(c, Bayes{p_0, p_1}); },
        py::arg("curve"), py::arg("p_0"), py::arg("p_1"));

    m.def(
        "run_sweep",
        [](const std::string& config_text) {
            const ExperimentConfig cfg = parse_config(config_text);
            SweepReport r;
            {
                py::gil_scoped_release release;
                r = run_sweep(cfg);
            }
            py::dict d;
            d["files"] = r.files;
            d["errors"] = r.errors;
            d["csv"] = emit_csv(r.table);
            return d;
        },
        py::arg("config_text"), "Runs a sweep from config text; returns written files, errors and the combined CSV.");
}
