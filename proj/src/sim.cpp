#include "fohs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <random>

#include "fohs/csv.hpp"
#include "fohs/error.hpp"
#include "fohs/parallel.hpp"

namespace fohs {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double reciprocal_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) {
        return 0.0;
    }
    return 1.0 / std::tgamma(x);
}

struct Estimate {
    double value;
    double rel_error;
};

// Summed in extended precision to soften the cancellation for negative z.
Estimate ml_series(double alpha, double z) {
    using ld = long double;
    const ld logz = std::log(std::abs(static_cast<ld>(z)));
    ld sum = 1.0L;
    ld max_term = 1.0L;
    ld prev_log = 0.0L;
    ld max_log = 0.0L;
    for (int k = 1; k < 20000; ++k) {
        const ld log_mag = k * logz - std::lgamma(static_cast<ld>(alpha) * k + 1.0L);
        const ld term = ((z < 0.0 && (k % 2) != 0) ? -1.0L : 1.0L) * std::exp(log_mag);
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        max_log = std::max(max_log, std::abs(log_mag));
        if (!std::isfinite(sum)) {
            return {static_cast<double>(sum), std::numeric_limits<double>::infinity()};
        }
        if (log_mag < prev_log && std::abs(term) <= 1e-19L * std::abs(sum)) {
            const ld eps = std::numeric_limits<ld>::epsilon();
            // each term carries a relative error of about eps * |log term|
            const ld err = 10.0L * eps * (1.0L + max_log) * max_term /
                           std::max(std::abs(sum), std::numeric_limits<ld>::min());
            return {static_cast<double>(sum), std::max(static_cast<double>(err), kEps)};
        }
        prev_log = log_mag;
    }
    return {static_cast<double>(sum), std::numeric_limits<double>::infinity()};
}

// -sum_{k>=1} z^-k / Gamma(1 - alpha k), valid for 0 < alpha < 1 and z -> -inf.
Estimate ml_asymptotic(double alpha, double z) {
    double sum = 0.0;
    double last = std::numeric_limits<double>::infinity();
    double zk = 1.0;
    for (int k = 1; k < 400; ++k) {
        zk /= z;
        const double term = -zk * reciprocal_gamma(1.0 - alpha * k);
        const double mag = std::abs(term);
        if (mag == 0.0) {
            continue;  // 1/Gamma vanishes at the poles
        }
        if (mag > last) {
            break;
        }
        sum += term;
        last = mag;
        if (mag <= 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return {sum, last / std::max(std::abs(sum), std::numeric_limits<double>::min())};
}

std::uint64_t draw(std::mt19937_64& rng) { return rng(); }

class ModeSelector {
public:
    ModeSelector(const SwitchingRule& rule, std::size_t modes, std::uint64_t seed)
        : rule_(rule), modes_(modes), rng_(seed) {}

    int select(std::size_t step, const Vector& x) {
        if (rule_.kind == SwitchingRule::Kind::ArbitrarySeeded) {
            if (step % rule_.dwell == 0) {
                current_ = static_cast<int>(draw(rng_) % modes_);
            }
            return current_;
        }
        const double norm = x.norm();
        if (norm == 0.0) {
            return current_;
        }
        double score = rule_.q.size() == 0 ? 0.0 : x.dot(rule_.q * x) / (norm * norm);
        if (rule_.w.size() != 0) {
            score += rule_.w.dot(x) / norm;
        }
        if (score > rule_.band) {
            in_band_ = false;
            current_ = 0;
        } else if (score < -rule_.band) {
            in_band_ = false;
            current_ = 1;
        } else if (!in_band_) {
            in_band_ = true;
            current_ = static_cast<int>(draw(rng_) & 1U);
        }
        return current_;
    }

private:
    const SwitchingRule& rule_;
    std::size_t modes_;
    std::mt19937_64 rng_;
    int current_ = 0;
    bool in_band_ = false;
};

std::size_t step_count(const SimOptions& o) {
    if (!(o.h > 0.0) || !std::isfinite(o.h)) {
        fail(ErrorKind::InvalidArgument, "step h must be positive");
    }
    if (!(o.horizon > o.h) || !std::isfinite(o.horizon)) {
        fail(ErrorKind::InvalidArgument, "horizon T must exceed the step h");
    }
    return static_cast<std::size_t>(std::floor(o.horizon / o.h + 1e-9));
}

void guard_step(const Matrix& a, double alpha, double h, const char* what) {
    const double g = std::pow(h, alpha) * a.operatorNorm();
    if (g > 1.0) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "h^alpha*|A| = %.6g > 1 for %s at t = 0; reduce h", g, what);
        fail(ErrorKind::StepTooLarge, buf);
    }
}

// Deviation history y = x - base per component. A component can restart its
// memory at a given step (after a reset clears it).
class GlEngine {
public:
    GlEngine(double alpha, double h, std::size_t steps, const Vector& x0, std::size_t window)
        : steps_(steps), window_(window), ha_(std::pow(h, alpha)), base_(x0),
          start_(static_cast<std::size_t>(x0.size()), 0), hist_(Matrix::Zero(static_cast<Eigen::Index>(steps) + 1, x0.size())) {
        const auto c = gl_coefficients(alpha, steps + 1);
        crev_.resize(static_cast<Eigen::Index>(steps));
        for (std::size_t m = 0; m < steps; ++m) {
            crev_(static_cast<Eigen::Index>(m)) = c[steps - m];
        }
    }

    // x_k from the right-hand side evaluated at x_{k-1}.
    Vector advance(std::size_t k, const Vector& rhs) {
        Vector x(rhs.size());
        for (Eigen::Index i = 0; i < rhs.size(); ++i) {
            std::size_t lo = start_[static_cast<std::size_t>(i)];
            if (window_ > 0 && k > window_) {
                lo = std::max(lo, k - window_);
            }
            const auto len = static_cast<Eigen::Index>(k - lo);
            const double conv =
                hist_.col(i).segment(static_cast<Eigen::Index>(lo), len)
                    .dot(crev_.segment(static_cast<Eigen::Index>(steps_ - k + lo), len));
            const double y = ha_ * rhs(i) - conv;
            hist_(static_cast<Eigen::Index>(k), i) = y;
            x(i) = base_(i) + y;
        }
        return x;
    }

    // Overwrite step k with a jumped state; flagged components restart memory.
    void jump(std::size_t k, const Vector& x, const std::vector<bool>& restart) {
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (restart[static_cast<std::size_t>(i)]) {
                start_[static_cast<std::size_t>(i)] = k;
                base_(i) = x(i);
            }
            hist_(static_cast<Eigen::Index>(k), i) = x(i) - base_(i);
        }
    }

private:
    std::size_t steps_;
    std::size_t window_;
    double ha_;
    Vector base_;
    std::vector<std::size_t> start_;
    Matrix hist_;
    Vector crev_;
};

void push(Trajectory& t, double time, const Vector& x, int mode, double y) {
    t.times.push_back(time);
    t.states.push_back(x);
    t.active_mode.push_back(mode);
    t.outputs.push_back(y);
}

} // namespace

std::vector<double> gl_coefficients(double alpha, std::size_t count) {
    if (count < 1) {
        fail(ErrorKind::InvalidArgument, "coefficient count must be at least 1");
    }
    std::vector<double> c(count);
    c[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        c[j] = c[j - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(j));
    }
    return c;
}

double mittag_leffler(double alpha, double z) {
    if (!(alpha > 0.0) || !std::isfinite(z)) {
        fail(ErrorKind::InvalidArgument, "Mittag-Leffler needs alpha > 0 and finite z");
    }
    if (std::abs(z) > 50.0) {
        fail(ErrorKind::ConvergenceFailure, "|z| = " + std::to_string(std::abs(z)) + " exceeds 50");
    }
    if (z == 0.0) {
        return 1.0;
    }
    if (alpha == 1.0) {
        return std::exp(z);
    }
    if (alpha == 2.0) {
        return z < 0.0 ? std::cos(std::sqrt(-z)) : std::cosh(std::sqrt(z));
    }
    Estimate best = ml_series(alpha, z);
    if (alpha < 1.0 && z < 0.0 && !(best.rel_error <= 1e-12)) {
        const Estimate asym = ml_asymptotic(alpha, z);
        if (asym.rel_error < best.rel_error) {
            best = asym;
        }
    }
    if (!std::isfinite(best.value) || !(best.rel_error <= 1e-6)) {
        fail(ErrorKind::ConvergenceFailure, "no accurate evaluation route for alpha = " +
                                                std::to_string(alpha) + ", z = " + std::to_string(z));
    }
    return best.value;
}

void SwitchingRule::validate(std::size_t modes, Eigen::Index n) const {
    if (modes == 0) {
        fail(ErrorKind::InvalidArgument, "switching rule needs at least one mode");
    }
    if (kind == Kind::ArbitrarySeeded) {
        if (dwell == 0) {
            fail(ErrorKind::InvalidArgument, "dwell must be at least one step");
        }
        return;
    }
    if (modes != 2) {
        fail(ErrorKind::InvalidArgument, "state-region rules select between exactly two modes");
    }
    if (w.size() != 0 && w.size() != n) {
        fail(ErrorKind::DimensionMismatch, "region weight vector has the wrong length");
    }
    if (q.size() != 0 && (q.rows() != n || q.cols() != n)) {
        fail(ErrorKind::DimensionMismatch, "region quadratic form has the wrong size");
    }
    if (w.size() == 0 && q.size() == 0) {
        fail(ErrorKind::InvalidArgument, "state-region rule needs w or Q");
    }
    if (!(band >= 0.0)) {
        fail(ErrorKind::InvalidArgument, "band must be non-negative");
    }
}

const char* to_string(EventKind k) noexcept { return k == EventKind::Switch ? "switch" : "reset"; }

Trajectory simulate_switched(const SwitchedSystem& sys, const SwitchingRule& rule, const Vector& x0,
                             const SimOptions& options) {
    const Eigen::Index n = sys.dimension();
    if (x0.size() != n) {
        fail(ErrorKind::DimensionMismatch, "initial state has the wrong dimension");
    }
    rule.validate(sys.modes.size(), n);
    const std::size_t steps = step_count(options);
    for (std::size_t i = 0; i < sys.modes.size(); ++i) {
        guard_step(sys.modes[i], sys.alpha, options.h, ("mode " + std::to_string(i)).c_str());
    }

    GlEngine gl(sys.alpha, options.h, steps, x0, options.window);
    ModeSelector selector(rule, sys.modes.size(), rule.seed);

    Trajectory t;
    t.times.reserve(steps + 1);
    t.states.reserve(steps + 1);
    Vector x = x0;
    int mode = selector.select(0, x);
    push(t, 0.0, x, mode, x.norm());
    for (std::size_t k = 1; k <= steps; ++k) {
        x = gl.advance(k, sys.modes[static_cast<std::size_t>(mode)] * x);
        const double time = static_cast<double>(k) * options.h;
        const int next = selector.select(k, x);
        if (next != mode) {
            t.events.push_back({time, k, EventKind::Switch, x, x});
        }
        mode = next;
        push(t, time, x, mode, x.norm());
    }
    return t;
}

Trajectory simulate_reset(const ResetControlSystem& sys, const Vector& x0, const ResetSimOptions& options) {
    sys.validate();
    const Eigen::Index n = sys.dims.total();
    if (x0.size() != n) {
        fail(ErrorKind::DimensionMismatch, "initial state has the wrong dimension");
    }
    const std::size_t steps = step_count(options);
    guard_step(sys.a_cl, sys.alpha, options.h, "the closed loop");

    std::vector<bool> restart(static_cast<std::size_t>(n), false);
    if (options.memory == MemoryMode::ClearResetStates) {
        for (Eigen::Index i = n - sys.dims.n_reset; i < n; ++i) {
            restart[static_cast<std::size_t>(i)] = true;
        }
    }
    const Vector forcing = sys.b_cl * sys.r;

    GlEngine gl(sys.alpha, options.h, steps, x0, options.window);
    Trajectory t;
    t.times.reserve(steps + 1);
    t.states.reserve(steps + 1);
    Vector x = x0;
    push(t, 0.0, x, 0, sys.c_cl.dot(x));

    double e_prev = sys.r - sys.c_cl.dot(x);
    bool pending = false;
    std::deque<std::size_t> recent;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double time = static_cast<double>(k) * options.h;
        if (pending) {
            const Vector pre = x;
            x = sys.a_r * pre;
            gl.jump(k, x, restart);
            t.events.push_back({time, k, EventKind::Reset, pre, x});
            pending = false;
            recent.push_back(k);
            while (!recent.empty() && recent.front() + options.zeno_window <= k) {
                recent.pop_front();
            }
            if (recent.size() > options.zeno_limit) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%zu resets within %zu samples at t = %.6g", recent.size(),
                              options.zeno_window, time);
                fail(ErrorKind::ZenoGuard, buf);
            }
        } else {
            x = gl.advance(k, sys.a_cl * x + forcing);
        }
        const double y = sys.c_cl.dot(x);
        const double e = sys.r - y;
        const bool crossed = e_prev * e < 0.0 || std::abs(e) <= options.surface_tol * x.norm();
        pending = crossed && (x - sys.a_r * x).norm() > options.state_tol;
        e_prev = e;
        push(t, time, x, 0, y);
    }
    return t;
}

std::vector<Trajectory> simulate_portrait(const SwitchedSystem& sys, const SwitchingRule& rule,
                                          const std::vector<Vector>& initial_conditions,
                                          const SimOptions& options) {
    std::vector<Trajectory> runs(initial_conditions.size());
    parallel_for(initial_conditions.size(), [&](std::size_t i) {
        SwitchingRule r = rule;
        r.seed = rule.seed + i;
        runs[i] = simulate_switched(sys, r, initial_conditions[i], options);
    });
    return runs;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
    const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
    std::vector<std::string> header{"t"};
    for (Eigen::Index i = 0; i < n; ++i) {
        header.push_back("x" + std::to_string(i + 1));
    }
    header.insert(header.end(), {"y", "active_mode", "event"});

    std::map<std::size_t, std::string> labels;
    for (const auto& e : traj.events) {
        auto& s = labels[e.step];
        s += s.empty() ? to_string(e.kind) : std::string(";") + to_string(e.kind);
    }

    CsvWriter csv(path, header);
    std::vector<CsvWriter::Cell> row;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        row.clear();
        row.emplace_back(traj.times[k]);
        for (Eigen::Index i = 0; i < n; ++i) {
            row.emplace_back(traj.states[k](i));
        }
        row.emplace_back(traj.outputs[k]);
        row.emplace_back(static_cast<long long>(traj.active_mode[k]));
        const auto it = labels.find(k);
        row.emplace_back(it == labels.end() ? std::string() : it->second);
        csv.row(row);
    }
}

std::vector<std::string> write_portrait(const std::vector<Trajectory>& runs, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const Eigen::Index n = runs.empty() || runs.front().states.empty() ? 0 : runs.front().states.front().size();
    std::vector<std::string> header{"index", "file"};
    for (Eigen::Index i = 0; i < n; ++i) {
        header.push_back("x0_" + std::to_string(i + 1));
    }
    header.push_back("final_norm");
    CsvWriter index(dir / "index.csv", header);

    std::vector<std::string> names;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        char name[32];
        std::snprintf(name, sizeof name, "traj_%03zu.csv", r);
        names.emplace_back(name);
        write_trajectory_csv(runs[r], dir / name);
        std::vector<CsvWriter::Cell> row{static_cast<long long>(r), std::string(name)};
        for (Eigen::Index i = 0; i < n; ++i) {
            row.emplace_back(runs[r].states.front()(i));
        }
        row.emplace_back(runs[r].states.back().norm());
        index.row(row);
    }
    return names;
}

} // namespace fohs
