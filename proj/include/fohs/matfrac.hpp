#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fohs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultConditionCap = 1e8;

// One commensurate-order mode  D^alpha x = A x  with 0 < alpha < 2.
struct FoLtiSystem {
    Matrix a_matrix;
    double alpha;

    FoLtiSystem(Matrix a, double order);
};

struct SpectralDecomposition {
    CVector eigenvalues;
    CMatrix right_eigenvectors;  // unit-norm columns
    double condition_estimate;   // 2-norm condition number of right_eigenvectors
};

void require_square(const Matrix& a, const char* what);

// Eigenvalues and right eigenvectors of a real square matrix. Throws
// DefectiveMatrix when the eigenvector basis is worse conditioned than
// condition_cap, which makes spectral matrix functions untrustworthy.
SpectralDecomposition spectral_decompose(const Matrix& a,
                                         double condition_cap = kDefaultConditionCap);

// Eigenvalues only; works for defective matrices too.
CVector eigenvalues(const Matrix& a);

// Lexicographic (real part, then imaginary part).
CVector sorted_eigenvalues(CVector values);

struct PowerResult {
    CMatrix value;
    bool is_real;  // imaginary part was below 1e-9 * ||value|| and has been zeroed

    [[nodiscard]] Matrix real() const;
};

// Principal power a^p = V diag(exp(p Log lambda)) V^-1 with arg in (-pi, pi].
// Eigenvalues on the closed negative real axis (including 0) are rejected
// with BranchCutEigenvalue.
PowerResult frac_power(const Matrix& a, double p, double condition_cap = kDefaultConditionCap);

// -(-A)^(1/(2-alpha)) for 0 < alpha <= 1; returns A itself at alpha == 1.
Matrix curly_a(const FoLtiSystem& sys, double condition_cap = kDefaultConditionCap);
Matrix curly_a(const Matrix& a, double alpha, double condition_cap = kDefaultConditionCap);

// min_i |arg lambda_i| - alpha*pi/2. Positive: asymptotically stable mode.
double folti_stability_margin(const FoLtiSystem& sys);
double folti_stability_margin(const Matrix& a, double alpha);

} // namespace fohs
