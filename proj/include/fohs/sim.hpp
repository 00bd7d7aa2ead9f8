#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fohs/lmi.hpp"
#include "fohs/reset.hpp"

namespace fohs {

// c_0 = 1, c_j = c_{j-1} (1 - (alpha + 1)/j), i.e. (-1)^j binom(alpha, j).
std::vector<double> gl_coefficients(double alpha, std::size_t count);

// E_alpha(z) = sum_k z^k / Gamma(alpha k + 1) for real z, |z| <= 50.
double mittag_leffler(double alpha, double z);

struct SwitchingRule {
    enum class Kind { ArbitrarySeeded, StateRegions };

    Kind kind = Kind::ArbitrarySeeded;
    std::uint64_t seed = 0;
    // ArbitrarySeeded: a uniformly drawn mode is held for `dwell` steps.
    std::size_t dwell = 1;
    // StateRegions (two modes): score s(x) = w'x/|x| + x'Qx/|x|^2. Mode 0 when
    // s > band, mode 1 when s < -band; inside the band a random mode is drawn
    // on entry and held until the state leaves it.
    Vector w;
    Matrix q;
    double band = 0.0;

    void validate(std::size_t modes, Eigen::Index n) const;
};

enum class EventKind { Switch, Reset };

const char* to_string(EventKind k) noexcept;

struct TrajectoryEvent {
    double time;
    std::size_t step;
    EventKind kind;
    Vector pre;
    Vector post;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<int> active_mode;
    std::vector<double> outputs;  // |x| for switched systems, C x for reset loops
    std::vector<TrajectoryEvent> events;
};

struct SimOptions {
    double h = 1e-3;
    double horizon = 5.0;
    std::size_t window = 0;  // memory length in steps; 0 keeps the full history
};

enum class MemoryMode { ClearResetStates, Retain };

struct ResetSimOptions : SimOptions {
    MemoryMode memory = MemoryMode::ClearResetStates;
    double surface_tol = 1e-9;  // relative to |x|
    double state_tol = 1e-12;
    std::size_t zeno_window = 100;
    std::size_t zeno_limit = 50;
};

// Explicit Grunwald-Letnikov scheme on the deviation y = x - x0 (Caputo-style
// initial condition): y_k = h^a A x_{k-1} - sum_{j>=1} c_j y_{k-j}.
Trajectory simulate_switched(const SwitchedSystem& sys, const SwitchingRule& rule, const Vector& x0,
                             const SimOptions& options);

// Reset detection on e = r - C x; a pending reset is applied at the next sample
// as x <- A_R x.
Trajectory simulate_reset(const ResetControlSystem& sys, const Vector& x0, const ResetSimOptions& options);

// One trajectory per initial condition; the i-th run uses seed rule.seed + i.
std::vector<Trajectory> simulate_portrait(const SwitchedSystem& sys, const SwitchingRule& rule,
                                          const std::vector<Vector>& initial_conditions,
                                          const SimOptions& options);

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

// traj_000.csv ... plus index.csv (index, file, x0 components, final_norm).
// Returns the written trajectory file names.
std::vector<std::string> write_portrait(const std::vector<Trajectory>& runs, const std::filesystem::path& dir);

} // namespace fohs
