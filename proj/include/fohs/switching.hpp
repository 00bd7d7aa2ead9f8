#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "fohs/lmi.hpp"

namespace fohs {

// Logarithmically spaced frequencies in rad/s.
struct FrequencyGrid {
    double omega_min = 1e-4;
    double omega_max = 1e4;
    std::size_t points = 2000;

    void validate() const;
    [[nodiscard]] std::vector<double> omegas() const;
};

struct PhaseSweepResult {
    std::vector<double> omegas;
    std::vector<double> arg1;   // unwrapped
    std::vector<double> arg2;
    std::vector<double> diffs;  // |arg1 - arg2|
    double max_diff = 0.0;
    double argmax_omega = 0.0;
    double threshold = kPi / 2.0;
};

// Principal arg det(A' - j w I), A' the A-transform (0 < alpha <= 1).
double phase_of_det_low(const Matrix& a, double alpha, double omega);

// Principal arg det((A^2 - w^2 I) - 2 j w sin(alpha pi/2) A), 1 <= alpha < 2.
double phase_of_det_high(const Matrix& a, double alpha, double omega);

// Continuous phase curves over ascending frequencies. The branch is anchored
// at the w -> 0+ limit, where the determinant is real, then continued so that
// consecutive samples differ by less than pi.
std::vector<double> phase_curve_low(const Matrix& a, double alpha, const std::vector<double>& omegas);
std::vector<double> phase_curve_high(const Matrix& a, double alpha, const std::vector<double>& omegas);

// alpha <= 1 uses the low formulation, alpha > 1 the high one.
PhaseSweepResult phase_difference_sweep(const Matrix& a1, const Matrix& a2, double alpha,
                                        const FrequencyGrid& grid = {});

void write_sweep_csv(const PhaseSweepResult& sweep, const std::filesystem::path& path);

enum class Verdict { QuadraticallyStable, Inconclusive, SubsystemUnstable };

const char* to_string(Verdict v) noexcept;

struct VerdictOptions {
    double band = 0.02;    // indeterminacy band below pi/2
    bool certify = true;   // also require a verified common P
    FindOptions search;
};

struct PairEvidence {
    std::size_t first;
    std::size_t second;
    double max_diff;
    double argmax_omega;
};

struct SwitchingVerdict {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<std::size_t> unstable_mode;
    std::vector<double> mode_margins;
    std::vector<PairEvidence> pairs;
    bool phase_test_passed = false;
    std::optional<LyapunovCertificate> certificate;
    int search_iterations = 0;
    bool search_attempted = false;
};

SwitchingVerdict switching_stability_verdict(const SwitchedSystem& sys, const FrequencyGrid& grid = {},
                                             const VerdictOptions& options = {});

} // namespace fohs
