// Python bindings for the main pricing and analysis operations.
#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mapricer/analysis.hpp"
#include "mapricer/closed_form.hpp"
#include "mapricer/errors.hpp"
#include "mapricer/map_core.hpp"
#include "mapricer/mellin_pricer.hpp"
#include "mapricer/reports.hpp"
#include "mapricer/simulator.hpp"
#include "mapricer/special_functions.hpp"

namespace py = pybind11;
using namespace mapricer;

namespace {

std::vector<std::vector<Complex>> matrix_to_nested(const ComplexMatrix& m) {
    std::vector<std::vector<Complex>> out(m.dim(), std::vector<Complex>(m.dim()));
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) out[i][j] = m(i, j);
    return out;
}

py::dict estimate_to_dict(const PriceEstimate& est) {
    py::dict d;
    d["value"] = est.value;
    d["error"] = est.error;
    d["method"] = PriceEstimate::method_name(est.method);
    return d;
}

McConfig config_from_kwargs(std::uint64_t n_paths, std::uint64_t seed, unsigned n_workers,
                            int asian_grid) {
    McConfig cfg;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    cfg.n_workers = n_workers;
    cfg.asian_grid = asian_grid;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_mapricer, m) {
    m.doc() = "European and Asian option pricing under regime-switching Levy models";

    py::register_exception<mapricer::Error>(m, "MapricerError");

    py::class_<MapModel>(m, "Model")
        .def_static("from_json", &load_model_json, py::arg("text"))
        .def_static("from_file", &load_model_file, py::arg("path"))
        .def("to_json", [](const MapModel& model) { return model_to_json(model); })
        .def_property_readonly("states", &MapModel::states)
        .def_property_readonly("rate", &MapModel::rate)
        .def("state_index", &MapModel::state_index)
        .def("strip",
             [](const MapModel& model) {
                 return std::make_pair(model.strip().lo, model.strip().hi);
             })
        .def("__repr__", [](const MapModel& model) {
            return "<mapricer.Model states=" + std::to_string(model.n_states()) + ">";
        });

    m.def("laplace_exponent",
          [](const MapModel& model, std::size_t a, Complex z) {
              return laplace_exponent(model, a, z);
          },
          py::arg("model"), py::arg("state"), py::arg("z"));
    m.def("transition_mgf", &transition_mgf, py::arg("model"), py::arg("from_state"),
          py::arg("to_state"), py::arg("z"));
    m.def("matrix_exponent",
          [](const MapModel& model, Complex z) { return matrix_to_nested(matrix_exponent(model, z)); },
          py::arg("model"), py::arg("z"));
    m.def("transform_matrix",
          [](const MapModel& model, double t, Complex z) {
              return matrix_to_nested(transform_matrix(model, t, z));
          },
          py::arg("model"), py::arg("t"), py::arg("z"));
    m.def("principal_eigenvalue", &principal_eigenvalue, py::arg("model"), py::arg("z"));
    m.def("cramer_number",
          [](const MapModel& model) {
              const CramerNumber theta = cramer_number(model);
              py::dict d;
              switch (theta.kind) {
                  case CramerNumber::Kind::Root: d["kind"] = "root"; break;
                  case CramerNumber::Kind::Zero: d["kind"] = "zero"; break;
                  case CramerNumber::Kind::Infinite: d["kind"] = "infinite"; break;
                  case CramerNumber::Kind::StripBounded: d["kind"] = "strip_bounded"; break;
              }
              d["theta"] = theta.theta;
              d["diagnostic"] = theta.diagnostic;
              return d;
          },
          py::arg("model"));

    m.def("classify",
          [](const MapModel& model, double tol) {
              return classification_to_json(model, classify_model(model, tol));
          },
          py::arg("model"), py::arg("tol") = 1e-10,
          "Full integrability / martingale report as a JSON string");
    m.def("generator_values", &generator_values, py::arg("model"));
    m.def("drift_correct", &drift_correct, py::arg("model"));

    m.def("price_call",
          [](const MapModel& model, std::size_t a, double spot, double strike, double maturity,
             double tol) { return estimate_to_dict(price_call(model, a, spot, strike, maturity, tol)); },
          py::arg("model"), py::arg("state"), py::arg("spot"), py::arg("strike"),
          py::arg("maturity"), py::arg("tol") = 1e-9);
    m.def("price_put",
          [](const MapModel& model, std::size_t a, double spot, double strike, double maturity,
             double tol) { return estimate_to_dict(price_put(model, a, spot, strike, maturity, tol)); },
          py::arg("model"), py::arg("state"), py::arg("spot"), py::arg("strike"),
          py::arg("maturity"), py::arg("tol") = 1e-9);
    m.def("price_digital",
          [](const MapModel& model, std::size_t a, double spot, double strike, double maturity) {
              return estimate_to_dict(
                  price_general(model, a, spot, maturity, PayoffSpec::digital(strike)));
          },
          py::arg("model"), py::arg("state"), py::arg("spot"), py::arg("strike"),
          py::arg("maturity"));

    m.def("mc_european",
          [](const MapModel& model, std::size_t a, double spot, double strike, double maturity,
             std::uint64_t n_paths, std::uint64_t seed, unsigned n_workers, int asian_grid) {
              const McConfig cfg = config_from_kwargs(n_paths, seed, n_workers, asian_grid);
              return estimate_to_dict(mc_european(
                  model, a, spot, [strike](double x) { return std::max(x - strike, 0.0); },
                  maturity, cfg));
          },
          py::arg("model"), py::arg("state"), py::arg("spot"), py::arg("strike"),
          py::arg("maturity"), py::arg("n_paths") = 200000, py::arg("seed") = 20240617,
          py::arg("n_workers") = 0, py::arg("asian_grid") = 64);
    m.def("mc_asian",
          [](const MapModel& model, std::size_t a, double spot, double strike, double maturity,
             std::uint64_t n_paths, std::uint64_t seed, unsigned n_workers, int asian_grid,
             const std::string& averaging) {
              const McConfig cfg = config_from_kwargs(n_paths, seed, n_workers, asian_grid);
              return estimate_to_dict(
                  mc_asian(model, a, spot, strike, maturity, cfg,
                           averaging == "raw" ? AsianAveraging::Raw : AsianAveraging::Mean));
          },
          py::arg("model"), py::arg("state"), py::arg("spot"), py::arg("strike"),
          py::arg("maturity"), py::arg("n_paths") = 200000, py::arg("seed") = 20240617,
          py::arg("n_workers") = 0, py::arg("asian_grid") = 64, py::arg("averaging") = "mean");
    m.def("mc_joint_transform",
          [](const MapModel& model, Complex z, double t, std::uint64_t n_paths,
             std::uint64_t seed) {
              const McConfig cfg = config_from_kwargs(n_paths, seed, 0, 64);
              const auto est = mc_joint_transform(model, z, t, cfg);
              return std::make_pair(matrix_to_nested(est.mean), matrix_to_nested(est.stderr_));
          },
          py::arg("model"), py::arg("z"), py::arg("t"), py::arg("n_paths") = 100000,
          py::arg("seed") = 20240617);

    py::class_<CpExpModel>(m, "CpExpModel")
        .def(py::init([](double q, double lambda_plus, double lambda_minus, double maturity,
                         double rate) {
                 CpExpModel model{q, lambda_plus, lambda_minus, maturity, rate};
                 model.validate();
                 return model;
             }),
             py::arg("q"), py::arg("lambda_plus"), py::arg("lambda_minus"), py::arg("maturity"),
             py::arg("rate") = 0.0)
        .def("to_map_model", [](const CpExpModel& model) { return to_map_model(model); })
        .def("call_price",
             [](const CpExpModel& model, int alpha, double strike) {
                 return estimate_to_dict(call_price_series(model, alpha, strike));
             },
             py::arg("state"), py::arg("strike"))
        .def("atm_price", [](const CpExpModel& model, int alpha) {
            return estimate_to_dict(atm_price(model, alpha));
        });

    py::class_<SkewModel>(m, "SkewModel")
        .def(py::init([](double q, double maturity, double rate) {
                 SkewModel model{q, maturity, rate};
                 model.validate();
                 return model;
             }),
             py::arg("q"), py::arg("maturity"), py::arg("rate") = 0.0)
        .def("to_map_model", [](const SkewModel& model) { return to_map_model(model); })
        .def("call_price",
             [](const SkewModel& model, double strike) { return skew_call_price(model, strike); },
             py::arg("strike"))
        .def("price_at_zero", &skew_price_at_zero);

    m.def("bessel_i1", &bessel_i1, py::arg("x"));
    m.def("upper_incomplete_gamma", &upper_incomplete_gamma, py::arg("n"), py::arg("x"));
    m.def("lower_incomplete_gamma", &lower_incomplete_gamma, py::arg("n"), py::arg("x"));
    m.def("hyp1f1", &hyp1f1, py::arg("a"), py::arg("b"), py::arg("x"));
}
