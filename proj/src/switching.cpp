#include "fohs/switching.hpp"

#include <algorithm>
#include <cmath>

#include "fohs/csv.hpp"
#include "fohs/error.hpp"
#include "fohs/parallel.hpp"

namespace fohs {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

void require_high(double alpha) {
    if (!(alpha >= 1.0 && alpha < 2.0)) {
        fail(ErrorKind::OrderOutOfRange,
             "the high-order phase needs 1 <= alpha < 2, got " + std::to_string(alpha));
    }
}

Complex det_shifted(const Matrix& m, double omega) {
    CMatrix c = m.cast<Complex>();
    c.diagonal().array() -= Complex(0.0, omega);
    return c.determinant();
}

Complex det_high(const Matrix& a, const Matrix& a2, double s, double omega) {
    CMatrix c = (a2 - omega * omega * Matrix::Identity(a.rows(), a.cols())).cast<Complex>();
    c -= Complex(0.0, 2.0 * omega * s) * a.cast<Complex>();
    return c.determinant();
}

double principal_real_arg(double x) { return x < 0.0 ? kPi : 0.0; }

// Nearest 2*pi shift of each principal value to its predecessor.
std::vector<double> unwrap_from(double anchor, std::vector<double> principal) {
    double previous = anchor;
    for (double& v : principal) {
        v += kTwoPi * std::round((previous - v) / kTwoPi);
        previous = v;
    }
    return principal;
}

template <class F>
std::vector<double> evaluate(const std::vector<double>& omegas, F&& f) {
    std::vector<double> out(omegas.size());
    parallel_for(omegas.size(), [&](std::size_t i) { out[i] = f(omegas[i]); });
    return out;
}

void require_ascending(const std::vector<double>& omegas) {
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] >= 0.0) || (i > 0 && !(omegas[i] > omegas[i - 1]))) {
            fail(ErrorKind::InvalidArgument, "frequencies must be non-negative and strictly ascending");
        }
    }
}

} // namespace

void FrequencyGrid::validate() const {
    if (!(omega_min > 0.0) || !std::isfinite(omega_max) || !(omega_min < omega_max)) {
        fail(ErrorKind::InvalidArgument, "frequency grid needs 0 < omega_min < omega_max");
    }
    if (points < 2) {
        fail(ErrorKind::InvalidArgument, "frequency grid needs at least 2 points");
    }
}

std::vector<double> FrequencyGrid::omegas() const {
    validate();
    std::vector<double> w(points);
    const double lo = std::log10(omega_min);
    const double step = (std::log10(omega_max) - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        w[i] = std::pow(10.0, lo + step * static_cast<double>(i));
    }
    w.front() = omega_min;
    w.back() = omega_max;
    return w;
}

double phase_of_det_low(const Matrix& a, double alpha, double omega) {
    return std::arg(det_shifted(curly_a(a, alpha), omega));
}

double phase_of_det_high(const Matrix& a, double alpha, double omega) {
    require_square(a, "mode matrix");
    require_high(alpha);
    return std::arg(det_high(a, a * a, std::sin(alpha * kPi / 2.0), omega));
}

std::vector<double> phase_curve_low(const Matrix& a, double alpha, const std::vector<double>& omegas) {
    require_ascending(omegas);
    const Matrix m = curly_a(a, alpha);
    const double anchor = principal_real_arg(m.determinant());
    return unwrap_from(anchor, evaluate(omegas, [&](double w) { return std::arg(det_shifted(m, w)); }));
}

std::vector<double> phase_curve_high(const Matrix& a, double alpha, const std::vector<double>& omegas) {
    require_square(a, "mode matrix");
    require_high(alpha);
    require_ascending(omegas);
    const Matrix a2 = a * a;
    const double s = std::sin(alpha * kPi / 2.0);
    const double anchor = principal_real_arg(a2.determinant());
    return unwrap_from(anchor,
                       evaluate(omegas, [&](double w) { return std::arg(det_high(a, a2, s, w)); }));
}

PhaseSweepResult phase_difference_sweep(const Matrix& a1, const Matrix& a2, double alpha,
                                        const FrequencyGrid& grid) {
    require_square(a1, "first mode");
    require_square(a2, "second mode");
    if (a1.rows() != a2.rows()) {
        fail(ErrorKind::DimensionMismatch, "modes have different dimensions");
    }
    if (!(alpha > 0.0 && alpha < 2.0)) {
        fail(ErrorKind::OrderOutOfRange, "order must lie in (0, 2), got " + std::to_string(alpha));
    }
    for (const Matrix* m : {&a1, &a2}) {
        if (folti_stability_margin(*m, alpha) <= 0.0) {
            fail(ErrorKind::SubsystemUnstable,
                 std::string(m == &a1 ? "first" : "second") + " mode is not stable at this order");
        }
    }

    PhaseSweepResult r;
    r.omegas = grid.omegas();
    if (alpha <= 1.0) {
        r.arg1 = phase_curve_low(a1, alpha, r.omegas);
        r.arg2 = phase_curve_low(a2, alpha, r.omegas);
    } else {
        r.arg1 = phase_curve_high(a1, alpha, r.omegas);
        r.arg2 = phase_curve_high(a2, alpha, r.omegas);
    }
    r.diffs.resize(r.omegas.size());
    for (std::size_t i = 0; i < r.omegas.size(); ++i) {
        r.diffs[i] = std::abs(r.arg1[i] - r.arg2[i]);
        if (i == 0 || r.diffs[i] > r.max_diff) {
            r.max_diff = r.diffs[i];
            r.argmax_omega = r.omegas[i];
        }
    }
    return r;
}

void write_sweep_csv(const PhaseSweepResult& sweep, const std::filesystem::path& path) {
    CsvWriter csv(path, {"omega", "arg1", "arg2", "absdiff"});
    for (std::size_t i = 0; i < sweep.omegas.size(); ++i) {
        csv.row({sweep.omegas[i], sweep.arg1[i], sweep.arg2[i], sweep.diffs[i]});
    }
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::QuadraticallyStable:
        return "QuadraticallyStable";
    case Verdict::Inconclusive:
        return "Inconclusive";
    case Verdict::SubsystemUnstable:
        return "SubsystemUnstable";
    }
    return "Inconclusive";
}

SwitchingVerdict switching_stability_verdict(const SwitchedSystem& sys, const FrequencyGrid& grid,
                                             const VerdictOptions& options) {
    SwitchingVerdict out;
    for (std::size_t i = 0; i < sys.modes.size(); ++i) {
        out.mode_margins.push_back(folti_stability_margin(sys.modes[i], sys.alpha));
    }
    for (std::size_t i = 0; i < sys.modes.size(); ++i) {
        if (out.mode_margins[i] <= 1e-9) {
            out.verdict = Verdict::SubsystemUnstable;
            out.unstable_mode = i;
            return out;
        }
    }

    const double limit = kPi / 2.0 - options.band;
    out.phase_test_passed = true;
    for (std::size_t i = 0; i < sys.modes.size(); ++i) {
        for (std::size_t j = i + 1; j < sys.modes.size(); ++j) {
            const PhaseSweepResult s = phase_difference_sweep(sys.modes[i], sys.modes[j], sys.alpha, grid);
            out.pairs.push_back({i, j, s.max_diff, s.argmax_omega});
            out.phase_test_passed = out.phase_test_passed && s.max_diff < limit;
        }
    }

    if (options.certify) {
        out.search_attempted = true;
        const FindResult found = find_common_p(sys, options.search);
        out.search_iterations = found.iterations;
        out.certificate = found.certificate;
    }

    const bool certified = !options.certify || out.certificate.has_value();
    out.verdict = out.phase_test_passed && certified ? Verdict::QuadraticallyStable : Verdict::Inconclusive;
    return out;
}

} // namespace fohs
