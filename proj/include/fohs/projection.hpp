#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fohs/matfrac.hpp"

namespace fohs {

// Orthonormal basis of the symmetric n x n matrices under the Frobenius inner
// product (off-diagonal elements carry 1/sqrt(2)).
class SymmetricBasis {
public:
    explicit SymmetricBasis(Eigen::Index n);

    [[nodiscard]] Eigen::Index size() const noexcept { return n_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return n_ * (n_ + 1) / 2; }

    [[nodiscard]] Matrix element(Eigen::Index k) const;
    [[nodiscard]] Vector coordinates(const Matrix& p) const;
    [[nodiscard]] Matrix matrix(const Vector& coords) const;

private:
    Eigen::Index n_;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> index_;
};

// Requirement map(P) >= floor * I for a linear map from Sym(n) into Sym(m).
// The projection clips toward floor + target/(1 + k/50) at iteration k.
struct ConeConstraint {
    std::function<Matrix(const Matrix&)> map;
    double floor;
    double target;
};

// <weights, P>_F == value
struct AffineConstraint {
    Matrix weights;
    double value;
};

struct ProjectionOptions {
    int max_iter = 5000;
    double relaxation = 1.8;
};

struct ProjectionOutcome {
    std::optional<Matrix> p;  // symmetric; satisfies every cone floor and affine constraint
    int iterations = 0;
    double best_slack = 0.0;  // max over iterates of min_j (lambda_min(map_j(P)) - floor_j)
};

// Relaxed alternating projections between the affine set
//   {(P, S_1..S_J) : S_j = map_j(P), affine constraints on P}
// and the product of shifted PSD cones {S_j >= floor_j I}. The affine step is an
// exact least-squares projection; the cone step clips eigenvalues.
ProjectionOutcome alternating_projections(Eigen::Index n, const std::vector<ConeConstraint>& cones,
                                          const std::vector<AffineConstraint>& equalities,
                                          const Matrix& start, const ProjectionOptions& options);

double min_eigenvalue(const Matrix& symmetric);
double max_eigenvalue(const Matrix& symmetric);
Matrix symmetrize(const Matrix& m);

} // namespace fohs
