#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fohs/matfrac.hpp"

namespace fohs {

// D^alpha x = A x with A ranging over the convex hull of the modes.
struct SwitchedSystem {
    std::vector<Matrix> modes;
    double alpha;

    SwitchedSystem(std::vector<Matrix> mode_matrices, double order);

    [[nodiscard]] Eigen::Index dimension() const { return modes.front().rows(); }
};

struct LyapunovCertificate {
    Matrix p_matrix;
    std::vector<double> margins;  // -lambda_max of each mode's LMI block
    double p_min_eig = 0.0;
    bool accepted = false;        // p_min_eig > 0 and every margin > 0
};

// A'P + PA with A the A-transform of the mode (0 < alpha <= 1).
Matrix lmi_block_low(const Matrix& a, double alpha, const Matrix& p);

// 2n x 2n block  [[X sin(phi), Y cos(phi)], [-Y cos(phi), X sin(phi)]]  with
// X = A'P + PA, Y = A'P - PA, phi = alpha*pi/2 (1 <= alpha < 2).
Matrix lmi_block_high(const Matrix& a, double alpha, const Matrix& p);

// Plain A'P + PA at alpha == 1, otherwise the low/high form above.
Matrix lmi_block(const Matrix& a, double alpha, const Matrix& p);

LyapunovCertificate verify_certificate(const SwitchedSystem& sys, const Matrix& p);

struct FindOptions {
    int max_iter = 5000;
    double epsilon = 1e-6;      // strictness shift on the unit-norm blocks
    double relaxation = 1.8;
};

enum class NotFoundReason { None, SubsystemUnstable, IterationLimit };

struct FindResult {
    std::optional<LyapunovCertificate> certificate;
    NotFoundReason reason = NotFoundReason::None;
    std::optional<std::size_t> unstable_mode;
    int iterations = 0;

    [[nodiscard]] bool found() const { return certificate.has_value(); }
};

// Searches for a common P (trace P = n). The search is heuristic; a returned
// certificate has always passed verify_certificate. Absence is inconclusive,
// never a proof of instability.
FindResult find_common_p(const SwitchedSystem& sys, const FindOptions& options = {});

} // namespace fohs
