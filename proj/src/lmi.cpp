#include "fohs/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fohs/error.hpp"
#include "fohs/projection.hpp"

namespace fohs {

namespace {

void require_symmetric(const Matrix& p, Eigen::Index n) {
    if (p.rows() != n || p.cols() != n) {
        fail(ErrorKind::DimensionMismatch, "P is " + std::to_string(p.rows()) + "x" +
                                               std::to_string(p.cols()) + ", expected " +
                                               std::to_string(n) + "x" + std::to_string(n));
    }
    if ((p - p.transpose()).norm() > 1e-9 * std::max(1.0, p.norm())) {
        fail(ErrorKind::InvalidArgument, "P must be symmetric");
    }
}

Matrix lyapunov(const Matrix& a, const Matrix& p) { return symmetrize(a.transpose() * p + p * a); }

Matrix sector_block(const Matrix& a, double alpha, const Matrix& p) {
    const double phi = alpha * kPi / 2.0;
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    const Matrix x = a.transpose() * p + p * a;
    const Matrix y = a.transpose() * p - p * a;
    const Eigen::Index n = a.rows();
    Matrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = x * s;
    out.topRightCorner(n, n) = y * c;
    out.bottomLeftCorner(n, n) = -y * c;
    out.bottomRightCorner(n, n) = x * s;
    return symmetrize(out);
}

void require_high_order(double alpha) {
    if (!(alpha >= 1.0 && alpha < 2.0)) {
        fail(ErrorKind::OrderOutOfRange,
             "the sector LMI needs 1 <= alpha < 2, got " + std::to_string(alpha));
    }
}

} // namespace

SwitchedSystem::SwitchedSystem(std::vector<Matrix> mode_matrices, double order)
    : modes(std::move(mode_matrices)), alpha(order) {
    if (modes.empty()) {
        fail(ErrorKind::InvalidArgument, "a switched system needs at least one mode");
    }
    for (const auto& m : modes) {
        require_square(m, "mode matrix");
        if (m.rows() != modes.front().rows()) {
            fail(ErrorKind::DimensionMismatch, "all modes must share one dimension");
        }
    }
    if (!(alpha > 0.0 && alpha < 2.0)) {
        fail(ErrorKind::OrderOutOfRange, "order must lie in (0, 2), got " + std::to_string(alpha));
    }
}

Matrix lmi_block_low(const Matrix& a, double alpha, const Matrix& p) {
    require_symmetric(p, a.rows());
    return lyapunov(curly_a(a, alpha), p);
}

Matrix lmi_block_high(const Matrix& a, double alpha, const Matrix& p) {
    require_square(a, "mode matrix");
    require_high_order(alpha);
    require_symmetric(p, a.rows());
    return sector_block(a, alpha, p);
}

Matrix lmi_block(const Matrix& a, double alpha, const Matrix& p) {
    if (alpha == 1.0) {
        require_square(a, "mode matrix");
        require_symmetric(p, a.rows());
        return lyapunov(a, p);
    }
    return alpha < 1.0 ? lmi_block_low(a, alpha, p) : lmi_block_high(a, alpha, p);
}

LyapunovCertificate verify_certificate(const SwitchedSystem& sys, const Matrix& p) {
    require_symmetric(p, sys.dimension());
    const Matrix ps = symmetrize(p);

    LyapunovCertificate cert;
    cert.p_matrix = ps;
    cert.p_min_eig = min_eigenvalue(ps);
    bool ok = cert.p_min_eig > 0.0;
    for (const auto& mode : sys.modes) {
        const double margin = -max_eigenvalue(lmi_block(mode, sys.alpha, ps));
        cert.margins.push_back(margin);
        ok = ok && margin > 0.0;
    }
    cert.accepted = ok;
    return cert;
}

FindResult find_common_p(const SwitchedSystem& sys, const FindOptions& options) {
    FindResult result;
    for (std::size_t i = 0; i < sys.modes.size(); ++i) {
        if (folti_stability_margin(sys.modes[i], sys.alpha) <= 1e-9) {
            result.reason = NotFoundReason::SubsystemUnstable;
            result.unstable_mode = i;
            return result;
        }
    }

    const Eigen::Index n = sys.dimension();
    const double alpha = sys.alpha;

    // The transformed matrices are computed once; each map is then linear in P.
    // Every block is homogeneous in its mode, so modes are normalised to unit
    // norm to keep a small mode from making the feasible set thin.
    std::vector<Matrix> effective;
    for (const auto& mode : sys.modes) {
        Matrix m = alpha < 1.0 ? curly_a(mode, alpha) : mode;
        const double norm = m.operatorNorm();
        effective.push_back(norm > 0.0 ? Matrix(m / norm) : m);
    }

    std::vector<ConeConstraint> cones;
    cones.push_back({[](const Matrix& p) { return p; }, options.epsilon, 1e-2});
    for (const auto& m : effective) {
        if (alpha <= 1.0) {
            cones.push_back({[m](const Matrix& p) { return Matrix(-lyapunov(m, p)); }, options.epsilon, 1e-2});
        } else {
            cones.push_back({[m, alpha](const Matrix& p) { return Matrix(-sector_block(m, alpha, p)); },
                             options.epsilon, 1e-2});
        }
    }
    const std::vector<AffineConstraint> trace{{Matrix::Identity(n, n), static_cast<double>(n)}};

    const ProjectionOutcome outcome = alternating_projections(
        n, cones, trace, Matrix::Identity(n, n), {options.max_iter, options.relaxation});
    result.iterations = outcome.iterations;
    if (outcome.p) {
        LyapunovCertificate cert = verify_certificate(sys, *outcome.p);
        if (cert.accepted) {
            result.certificate = std::move(cert);
            return result;
        }
    }
    result.reason = NotFoundReason::IterationLimit;
    return result;
}

} // namespace fohs
