#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "muprobe/bench.hpp"
#include "muprobe/blocks.hpp"
#include "muprobe/datadriven.hpp"
#include "muprobe/lti.hpp"
#include "muprobe/oracle.hpp"
#include "muprobe/power.hpp"
#include "muprobe/spectral.hpp"

namespace py = pybind11;
using namespace muprobe;

namespace {

py::dict estimate_dict(const MuEstimate& est) {
    py::dict d;
    d["mu"] = est.mu;
    d["peak_bin"] = est.peak_bin;
    d["peak_omega"] = est.peak_omega;
    d["mu_tilde"] = est.mu_tilde_curve;
    d["mu_bar"] = est.mu_bar_curve;
    std::vector<bool> conv(est.converged_bins.begin(), est.converged_bins.end());
    d["converged_bins"] = conv;
    d["iterations"] = est.iterations;
    d["restarts"] = est.restarts;
    d["experiments"] = est.experiments;
    d["converged"] = est.converged;
    d["zero_gain"] = est.zero_gain;
    d["history"] = est.history;
    return d;
}

}  // namespace

PYBIND11_MODULE(_muprobe, m) {
    m.doc() = "Data-driven lower bounds on the structured singular value.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

    py::class_<StateSpaceModel>(m, "StateSpaceModel")
        .def(py::init<RealMatrix, RealMatrix, RealMatrix, RealMatrix>(), py::arg("A"), py::arg("B"), py::arg("C"),
             py::arg("D"))
        .def_property_readonly("A", &StateSpaceModel::A)
        .def_property_readonly("B", &StateSpaceModel::B)
        .def_property_readonly("C", &StateSpaceModel::C)
        .def_property_readonly("D", &StateSpaceModel::D)
        .def_property_readonly("n", &StateSpaceModel::n)
        .def_property_readonly("spectral_radius", &StateSpaceModel::spectral_radius);

    m.def("random_stable", &random_stable, py::arg("n"), py::arg("n_x"), py::arg("pole_radius_max"), py::arg("seed"));
    m.def("freq_response", &freq_response, py::arg("model"), py::arg("omega"));
    m.def("transpose_model", &transpose_model, py::arg("model"));
    m.def(
        "simulate_periodic",
        [](const StateSpaceModel& model, const RealMatrix& period, int warm_periods, double noise_variance,
           std::uint64_t noise_seed) {
            return simulate_periodic(model, period, warm_periods, NoiseSpec{noise_variance, noise_seed});
        },
        py::arg("model"), py::arg("period"), py::arg("warm_periods") = 5, py::arg("noise_variance") = 0.0,
        py::arg("noise_seed") = 0);

    py::class_<BlockStructure>(m, "BlockStructure")
        .def(py::init<std::vector<Index>, std::vector<Index>>(), py::arg("scalar_sizes"), py::arg("full_sizes"))
        .def_static("from_rm", &BlockStructure::from_rm, py::arg("r"), py::arg("m"))
        .def_static("single_full", &BlockStructure::single_full, py::arg("n"))
        .def_static("single_repeated_scalar", &BlockStructure::single_repeated_scalar, py::arg("n"))
        .def_property_readonly("n", &BlockStructure::n)
        .def_property_readonly("r", &BlockStructure::r_notation)
        .def_property_readonly("m", &BlockStructure::m_notation)
        .def("__repr__", [](const BlockStructure& s) { return "BlockStructure(" + s.label() + ")"; })
        .def(py::self == py::self);

    m.def("update_z", &update_z, py::arg("structure"), py::arg("w"), py::arg("a"), py::arg("tol") = kDegeneracyTol);
    m.def("update_b", &update_b, py::arg("structure"), py::arg("a"), py::arg("w"), py::arg("tol") = kDegeneracyTol);

    m.def("dft_standard", [](const ComplexMatrix& x) { return dft_standard(TimeSignal(x)).bins; });
    m.def("idft_standard", [](const ComplexMatrix& X) { return idft_standard(SpectralSignal(X)).samples; });
    m.def("dft_time_reversed", [](const ComplexMatrix& r) { return dft_time_reversed(TimeSignal(r)).bins; });
    m.def("idft_time_reversed", [](const ComplexMatrix& Z) { return idft_time_reversed(SpectralSignal(Z)).samples; });

    m.def(
        "model_power_iteration",
        [](const ComplexMatrix& M, const BlockStructure& s, std::uint64_t seed, double tol, int max_iter,
           int max_restarts) {
            PowerIterationOptions o;
            o.seed = seed;
            o.tol = tol;
            o.max_iter = max_iter;
            o.max_restarts = max_restarts;
            const PowerIterationResult r = model_power_iteration(M, s, o);
            py::dict d;
            d["mu"] = r.mu;
            d["mu_tilde"] = r.mu_tilde;
            d["mu_bar"] = r.mu_bar;
            d["iterations"] = r.iterations;
            d["restarts"] = r.restarts;
            d["status"] = std::string(to_string(r.status));
            d["b"] = r.b;
            d["w"] = r.w;
            return d;
        },
        py::arg("M"), py::arg("structure"), py::arg("seed") = 0, py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
        py::arg("max_restarts") = 5);

    m.def(
        "model_mu_over_grid",
        [](const StateSpaceModel& model, const BlockStructure& s, Index N, std::uint64_t seed) {
            PowerIterationOptions o;
            o.seed = seed;
            const GridMuResult g = model_mu_over_grid(model, s, N, o);
            py::dict d;
            d["mu"] = g.mu_curve;
            d["peak"] = g.peak;
            d["peak_bin"] = g.peak_bin;
            d["peak_converged"] = g.peak_converged;
            return d;
        },
        py::arg("model"), py::arg("structure"), py::arg("N"), py::arg("seed") = 0);

    m.def(
        "estimate",
        [](const StateSpaceModel& model, const BlockStructure& s, Index N, std::uint64_t seed, double tol, int max_iter,
           int max_restarts, bool real_mode, double noise_variance, int warm_periods) {
            SimulatedOracle oracle(model, warm_periods, NoiseSpec{noise_variance, derive_seed(seed, 0x6e6f697365ULL)});
            RunOptions o;
            o.N = N;
            o.seed = seed;
            o.tol = tol;
            o.max_iter = max_iter;
            o.max_restarts = max_restarts;
            o.real_mode = real_mode;
            MuEstimate est;
            {
                py::gil_scoped_release release;
                est = run(oracle, s, o);
            }
            return estimate_dict(est);
        },
        py::arg("model"), py::arg("structure"), py::arg("N") = 1024, py::arg("seed") = 0, py::arg("tol") = 1e-4,
        py::arg("max_iter") = 100, py::arg("max_restarts") = 5, py::arg("real_mode") = true,
        py::arg("noise_variance") = 0.0, py::arg("warm_periods") = 5);

    m.def("exact_single_full", &exact_single_full, py::arg("M"));
    m.def("exact_single_repeated_scalar", &exact_single_repeated_scalar, py::arg("M"));
    m.def("random_search_lower_bound", &random_search_lower_bound, py::arg("M"), py::arg("structure"),
          py::arg("samples"), py::arg("seed") = 0);
    m.def("diag_scaling_upper_bound", &diag_scaling_upper_bound, py::arg("M"), py::arg("structure"),
          py::arg("iters") = 50);
    m.def("hinf_grid", &hinf_grid, py::arg("model"), py::arg("grid_size"));
}
