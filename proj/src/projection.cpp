#include "fohs/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "fohs/error.hpp"

namespace fohs {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Matrix clip_below(const Matrix& s, double level) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s));
    Vector w = es.eigenvalues().cwiseMax(level);
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::Map<const Vector> flat(const Matrix& m) { return {m.data(), m.size()}; }

} // namespace

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(symmetric), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

SymmetricBasis::SymmetricBasis(Eigen::Index n) : n_(n) {
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            index_.emplace_back(i, j);
        }
    }
}

Matrix SymmetricBasis::element(Eigen::Index k) const {
    const auto [i, j] = index_[static_cast<std::size_t>(k)];
    Matrix e = Matrix::Zero(n_, n_);
    if (i == j) {
        e(i, i) = 1.0;
    } else {
        e(i, j) = kInvSqrt2;
        e(j, i) = kInvSqrt2;
    }
    return e;
}

Vector SymmetricBasis::coordinates(const Matrix& p) const {
    Vector c(dimension());
    for (Eigen::Index k = 0; k < dimension(); ++k) {
        const auto [i, j] = index_[static_cast<std::size_t>(k)];
        c(k) = i == j ? p(i, i) : kInvSqrt2 * (p(i, j) + p(j, i));
    }
    return c;
}

Matrix SymmetricBasis::matrix(const Vector& coords) const {
    Matrix p = Matrix::Zero(n_, n_);
    for (Eigen::Index k = 0; k < dimension(); ++k) {
        const auto [i, j] = index_[static_cast<std::size_t>(k)];
        if (i == j) {
            p(i, i) = coords(k);
        } else {
            p(i, j) = kInvSqrt2 * coords(k);
            p(j, i) = p(i, j);
        }
    }
    return p;
}

ProjectionOutcome alternating_projections(Eigen::Index n, const std::vector<ConeConstraint>& cones,
                                          const std::vector<AffineConstraint>& equalities,
                                          const Matrix& start, const ProjectionOptions& options) {
    if (start.rows() != n || start.cols() != n) {
        fail(ErrorKind::DimensionMismatch, "start matrix does not match the problem size");
    }
    if (cones.empty()) {
        fail(ErrorKind::InvalidArgument, "at least one cone constraint is required");
    }

    const SymmetricBasis basis(n);
    const Eigen::Index d = basis.dimension();

    // Column k of the stacked operator holds vec(map_j(E_k)) for every cone j.
    std::vector<Eigen::Index> offsets;
    std::vector<Eigen::Index> sizes;
    Eigen::Index rows = 0;
    std::vector<std::vector<Matrix>> images(cones.size());
    for (std::size_t j = 0; j < cones.size(); ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            images[j].push_back(cones[j].map(basis.element(k)));
        }
        const Eigen::Index m = images[j].front().rows();
        offsets.push_back(rows);
        sizes.push_back(m);
        rows += m * m;
    }
    Matrix op(rows, d);
    for (std::size_t j = 0; j < cones.size(); ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            op.block(offsets[j], k, sizes[j] * sizes[j], 1) = flat(images[j][static_cast<std::size_t>(k)]);
        }
    }

    const auto q = static_cast<Eigen::Index>(equalities.size());
    Matrix kkt = Matrix::Zero(d + q, d + q);
    kkt.topLeftCorner(d, d) = op.transpose() * op;
    Vector rhs_eq(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        const auto& eq = equalities[static_cast<std::size_t>(i)];
        if (eq.weights.rows() != n || eq.weights.cols() != n) {
            fail(ErrorKind::DimensionMismatch, "affine constraint weights have the wrong size");
        }
        const Vector w = basis.coordinates(symmetrize(eq.weights));
        kkt.block(0, d + i, d, 1) = w;
        kkt.block(d + i, 0, 1, d) = w.transpose();
        rhs_eq(i) = eq.value;
    }
    const Eigen::FullPivLU<Matrix> solver(kkt);

    auto project_affine = [&](const Vector& stacked_target) {
        Vector rhs(d + q);
        rhs.head(d) = op.transpose() * stacked_target;
        rhs.tail(q) = rhs_eq;
        return Vector(solver.solve(rhs).head(d));
    };

    ProjectionOutcome outcome;
    outcome.best_slack = -std::numeric_limits<double>::infinity();

    Vector coords = project_affine(op * basis.coordinates(symmetrize(start)));
    Vector target(rows);
    for (int k = 0; k < options.max_iter; ++k) {
        outcome.iterations = k;
        const Matrix p = basis.matrix(coords);
        double slack = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < cones.size(); ++j) {
            const Matrix s = symmetrize(cones[j].map(p));
            slack = std::min(slack, min_eigenvalue(s) - cones[j].floor);
            const double level = cones[j].floor + cones[j].target / (1.0 + k / 50.0);
            const Matrix clipped = clip_below(s, std::max(2.0 * cones[j].floor, level));
            const Matrix relaxed = s + options.relaxation * (clipped - s);
            target.segment(offsets[j], sizes[j] * sizes[j]) = flat(relaxed);
        }
        outcome.best_slack = std::max(outcome.best_slack, slack);
        if (slack >= 0.0) {
            outcome.p = p;
            return outcome;
        }
        coords = project_affine(target);
    }
    outcome.iterations = options.max_iter;
    return outcome;
}

} // namespace fohs
