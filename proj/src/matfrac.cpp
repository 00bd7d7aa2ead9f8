#include "fohs/matfrac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fohs/error.hpp"

namespace fohs {

namespace {

constexpr double kResidualTolerance = 1e-10;
constexpr double kRealTruncation = 1e-9;

bool all_finite(const Matrix& a) { return a.allFinite(); }

std::string describe(Complex z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "j";
    return os.str();
}

} // namespace

FoLtiSystem::FoLtiSystem(Matrix a, double order) : a_matrix(std::move(a)), alpha(order) {
    require_square(a_matrix, "FoLtiSystem matrix");
    if (!(alpha > 0.0 && alpha < 2.0)) {
        fail(ErrorKind::OrderOutOfRange, "order must lie in (0, 2), got " + std::to_string(alpha));
    }
}

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        fail(ErrorKind::NonSquare, std::string(what) + " is " + std::to_string(a.rows()) + "x" +
                                       std::to_string(a.cols()) + ", expected non-empty square");
    }
    if (!all_finite(a)) {
        fail(ErrorKind::InvalidArgument, std::string(what) + " has non-finite entries");
    }
}

SpectralDecomposition spectral_decompose(const Matrix& a, double condition_cap) {
    require_square(a, "matrix");
    Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        fail(ErrorKind::NumericalFailure, "eigenvalue iteration did not converge");
    }

    SpectralDecomposition out;
    out.eigenvalues = solver.eigenvalues();
    out.right_eigenvectors = solver.eigenvectors();
    for (Eigen::Index j = 0; j < out.right_eigenvectors.cols(); ++j) {
        const double norm = out.right_eigenvectors.col(j).norm();
        if (norm > 0.0) {
            out.right_eigenvectors.col(j) /= norm;
        }
    }

    Eigen::JacobiSVD<CMatrix> svd(out.right_eigenvectors);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    out.condition_estimate =
        smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();

    if (!(out.condition_estimate <= condition_cap)) {
        fail(ErrorKind::DefectiveMatrix,
             "eigenvector condition estimate " + std::to_string(out.condition_estimate) +
                 " exceeds cap " + std::to_string(condition_cap));
    }

    const CMatrix ac = a.cast<Complex>();
    const double residual = (ac * out.right_eigenvectors -
                             out.right_eigenvectors * out.eigenvalues.asDiagonal())
                                .norm();
    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
    if (residual > kResidualTolerance * scale) {
        fail(ErrorKind::NumericalFailure,
             "eigen-decomposition residual " + std::to_string(residual) + " too large");
    }
    return out;
}

CVector eigenvalues(const Matrix& a) {
    require_square(a, "matrix");
    Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        fail(ErrorKind::NumericalFailure, "eigenvalue iteration did not converge");
    }
    return solver.eigenvalues();
}

CVector sorted_eigenvalues(CVector values) {
    std::vector<Complex> v(values.data(), values.data() + values.size());
    std::sort(v.begin(), v.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) {
            return x.real() < y.real();
        }
        return x.imag() < y.imag();
    });
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        values(i) = v[static_cast<std::size_t>(i)];
    }
    return values;
}

Matrix PowerResult::real() const {
    if (!is_real) {
        fail(ErrorKind::NumericalFailure, "matrix power has a non-negligible imaginary part");
    }
    return value.real();
}

PowerResult frac_power(const Matrix& a, double p, double condition_cap) {
    require_square(a, "matrix");
    if (!std::isfinite(p)) {
        fail(ErrorKind::InvalidArgument, "exponent must be finite");
    }
    const Eigen::Index n = a.rows();
    if (p == 1.0) {
        return {a.cast<Complex>(), true};
    }
    if (p == 0.0) {
        return {CMatrix::Identity(n, n), true};
    }

    const SpectralDecomposition dec = spectral_decompose(a, condition_cap);
    const double cut_tol = 1e-12 * std::max(1.0, a.norm());
    CVector powered(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex lambda = dec.eigenvalues(i);
        if (std::abs(lambda.imag()) <= cut_tol && lambda.real() <= cut_tol) {
            fail(ErrorKind::BranchCutEigenvalue,
                 "eigenvalue " + describe(lambda) + " lies on the principal branch cut");
        }
        powered(i) = std::exp(p * std::log(lambda));
    }

    const CMatrix& v = dec.right_eigenvectors;
    // X = V diag(powered) V^-1  <=>  V^T X^T = (V diag)^T
    const CMatrix scaled = v * powered.asDiagonal();
    CMatrix value = v.transpose().partialPivLu().solve(scaled.transpose()).transpose();

    const double norm = value.norm();
    const bool real = value.imag().norm() <= kRealTruncation * norm;
    if (real) {
        value = value.real().cast<Complex>();
    }
    return {std::move(value), real};
}

Matrix curly_a(const Matrix& a, double alpha, double condition_cap) {
    require_square(a, "mode matrix");
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        fail(ErrorKind::OrderOutOfRange,
             "the A-transform needs 0 < alpha <= 1, got " + std::to_string(alpha));
    }
    if (alpha == 1.0) {
        return a;
    }
    return -frac_power(-a, 1.0 / (2.0 - alpha), condition_cap).real();
}

Matrix curly_a(const FoLtiSystem& sys, double condition_cap) {
    return curly_a(sys.a_matrix, sys.alpha, condition_cap);
}

double folti_stability_margin(const Matrix& a, double alpha) {
    const CVector ev = eigenvalues(a);
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        worst = std::min(worst, std::abs(std::arg(ev(i))));
    }
    return worst - alpha * kPi / 2.0;
}

double folti_stability_margin(const FoLtiSystem& sys) {
    return folti_stability_margin(sys.a_matrix, sys.alpha);
}

} // namespace fohs
