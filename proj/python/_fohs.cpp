#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fohs/commands.hpp"
#include "fohs/config.hpp"
#include "fohs/error.hpp"
#include "fohs/lmi.hpp"
#include "fohs/matfrac.hpp"
#include "fohs/reset.hpp"
#include "fohs/sim.hpp"
#include "fohs/switching.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using Tf = std::tuple<double, std::vector<double>, std::vector<double>>;

fohs::CommensurateTransferFunction to_tf(const Tf& t) {
    fohs::CommensurateTransferFunction tf{std::get<0>(t), std::get<1>(t), std::get<2>(t)};
    tf.validate();
    return tf;
}

fohs::ResetControlSystem loop(const Tf& plant, const Tf& controller, const Tf& reset,
                              const std::optional<std::vector<double>>& beta_row) {
    auto sys = fohs::build_closed_loop(to_tf(plant), to_tf(controller), to_tf(reset));
    if (beta_row) {
        sys.beta_row = Eigen::Map<const fohs::RowVector>(beta_row->data(), static_cast<Eigen::Index>(beta_row->size()));
        sys.validate();
    }
    return sys;
}

fohs::FrequencyGrid grid(double omega_min, double omega_max, std::size_t points) {
    fohs::FrequencyGrid g{omega_min, omega_max, points};
    g.validate();
    return g;
}

py::dict certificate_dict(const fohs::LyapunovCertificate& c) {
    return py::dict("p"_a = c.p_matrix, "margins"_a = c.margins, "p_min_eig"_a = c.p_min_eig,
                    "accepted"_a = c.accepted);
}

} // namespace

PYBIND11_MODULE(_fohs, m) {
    m.doc() = "Stability tests and simulation for fractional-order switching and reset systems";
    m.attr("__version__") = FOHS_VERSION;

    static PyObject* const error = PyErr_NewException("fohs._fohs.FohsError", PyExc_RuntimeError, nullptr);
    m.add_object("FohsError", py::handle(error));
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const fohs::Error& e) {
            py::object exc = py::handle(error)(e.what());
            exc.attr("kind") = std::string(fohs::to_string(e.kind()));
            PyErr_SetObject(error, exc.ptr());
        }
    });

    m.def(
        "frac_power", [](const fohs::Matrix& a, double p) { return fohs::frac_power(a, p).value; }, "a"_a, "p"_a,
        "Principal matrix power a^p.");
    m.def(
        "curly_a", [](const fohs::Matrix& a, double alpha) { return fohs::curly_a(a, alpha); }, "a"_a, "alpha"_a,
        "-(-a)^(1/(2-alpha))");
    m.def(
        "stability_margin", [](const fohs::Matrix& a, double alpha) { return fohs::folti_stability_margin(a, alpha); },
        "a"_a, "alpha"_a, "min |arg lambda| - alpha pi / 2; positive means stable.");

    m.def(
        "verify_certificate",
        [](const std::vector<fohs::Matrix>& modes, double alpha, const fohs::Matrix& p) {
            return certificate_dict(fohs::verify_certificate(fohs::SwitchedSystem(modes, alpha), p));
        },
        "modes"_a, "alpha"_a, "p"_a);
    m.def(
        "find_common_p",
        [](const std::vector<fohs::Matrix>& modes, double alpha, int max_iter) -> py::object {
            fohs::FindOptions o;
            o.max_iter = max_iter;
            const auto r = fohs::find_common_p(fohs::SwitchedSystem(modes, alpha), o);
            if (!r.found()) {
                return py::none();
            }
            return certificate_dict(*r.certificate);
        },
        "modes"_a, "alpha"_a, "max_iter"_a = 5000, "Verified common P, or None.");
    m.def(
        "phase_difference_sweep",
        [](const fohs::Matrix& a1, const fohs::Matrix& a2, double alpha, double omega_min, double omega_max,
           std::size_t points) {
            const auto s = fohs::phase_difference_sweep(a1, a2, alpha, grid(omega_min, omega_max, points));
            return py::dict("omega"_a = s.omegas, "arg1"_a = s.arg1, "arg2"_a = s.arg2, "diff"_a = s.diffs,
                            "max_diff"_a = s.max_diff, "argmax_omega"_a = s.argmax_omega);
        },
        "a1"_a, "a2"_a, "alpha"_a, "omega_min"_a = 1e-4, "omega_max"_a = 1e4, "points"_a = 2000);
    m.def(
        "switching_verdict",
        [](const std::vector<fohs::Matrix>& modes, double alpha, bool certify) {
            fohs::VerdictOptions o;
            o.certify = certify;
            const auto v = fohs::switching_stability_verdict(fohs::SwitchedSystem(modes, alpha), {}, o);
            return std::string(fohs::to_string(v.verdict));
        },
        "modes"_a, "alpha"_a, "certify"_a = true);

    m.def(
        "h_beta",
        [](const Tf& plant, const Tf& controller, const Tf& reset, double beta, double p_r,
           std::complex<double> s, std::optional<std::vector<double>> beta_row) {
            return fohs::h_beta_evaluate(loop(plant, controller, reset, beta_row), beta, p_r, s);
        },
        "plant"_a, "controller"_a, "reset"_a, "beta"_a, "p_r"_a, "s"_a, "beta_row"_a = py::none(),
        "Transfer functions are (order, num, den) with ascending coefficients.");
    m.def(
        "beta_intervals",
        [](const Tf& plant, const Tf& controller, const Tf& reset, std::optional<std::vector<double>> beta_row,
           double lo, double hi) {
            fohs::BetaSearchOptions o;
            o.beta_lo = lo;
            o.beta_hi = hi;
            const auto r = fohs::beta_range_search(loop(plant, controller, reset, beta_row), {}, o);
            std::vector<std::pair<double, double>> out;
            for (const auto& i : r.intervals) {
                out.emplace_back(i.lower(), i.upper());
            }
            return out;
        },
        "plant"_a, "controller"_a, "reset"_a, "beta_row"_a = py::none(), "lo"_a = -5.0, "hi"_a = 5.0);

    m.def("mittag_leffler", &fohs::mittag_leffler, "alpha"_a, "z"_a);
    m.def("gl_coefficients", &fohs::gl_coefficients, "alpha"_a, "count"_a);
    m.def(
        "simulate_linear",
        [](const fohs::Matrix& a, double alpha, const fohs::Vector& x0, double h, double horizon) {
            fohs::SimOptions o;
            o.h = h;
            o.horizon = horizon;
            const auto t = fohs::simulate_switched(fohs::SwitchedSystem({a}, alpha), {}, x0, o);
            fohs::Matrix states(static_cast<Eigen::Index>(t.states.size()), x0.size());
            for (std::size_t k = 0; k < t.states.size(); ++k) {
                states.row(static_cast<Eigen::Index>(k)) = t.states[k].transpose();
            }
            return py::make_tuple(t.times, states);
        },
        "a"_a, "alpha"_a, "x0"_a, "h"_a, "horizon"_a, "Grunwald-Letnikov solution of D^alpha x = a x.");

    m.def(
        "run_config",
        [](const std::string& path, const std::string& command, std::optional<std::string> out_dir) {
            static const std::pair<const char*, fohs::Command> names[] = {
                {"analyze-switching", fohs::Command::AnalyzeSwitching},
                {"analyze-reset", fohs::Command::AnalyzeReset},
                {"beta-sweep", fohs::Command::BetaSweep},
                {"simulate", fohs::Command::Simulate},
            };
            for (const auto& [name, cmd] : names) {
                if (command == name) {
                    fohs::ConfigOverrides overrides;
                    if (out_dir) {
                        overrides.out_dir = *out_dir;
                    }
                    const auto r = fohs::run_command(cmd, fohs::load_config(path, overrides));
                    return py::make_tuple(r.exit_code, r.report.dump());
                }
            }
            fohs::fail(fohs::ErrorKind::InvalidArgument, "unknown command '" + command + "'");
        },
        "path"_a, "command"_a, "out_dir"_a = py::none(), "Returns (exit_code, report_json).");
    m.def(
        "experiment_schema", [] { return fohs::experiment_schema().dump(); }, "JSON Schema for configs, as text.");
}
