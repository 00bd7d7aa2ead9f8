#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "fohs/matfrac.hpp"

namespace gen {

inline fohs::Matrix normal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> d(0.0, 1.0);
    fohs::Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = d(rng);
        }
    }
    return m;
}

// Gaussian matrix shifted so the rightmost eigenvalue sits in [-1.5, -0.1].
inline fohs::Matrix hurwitz(std::mt19937_64& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> gap(0.1, 1.5);
    fohs::Matrix m = normal(rng, n, n);
    const double right = fohs::eigenvalues(m).real().maxCoeff();
    m.diagonal().array() -= right + gap(rng);
    return m;
}

// Well-conditioned similarity: I + 0.3 * Gaussian, redrawn until cond < 10.
inline fohs::Matrix similarity(std::mt19937_64& rng, Eigen::Index n) {
    for (;;) {
        fohs::Matrix t = fohs::Matrix::Identity(n, n) + 0.3 * normal(rng, n, n);
        Eigen::JacobiSVD<fohs::Matrix> svd(t);
        const auto& s = svd.singularValues();
        if (s(n - 1) > 0.0 && s(0) / s(n - 1) < 10.0) {
            return t;
        }
    }
}

} // namespace gen
