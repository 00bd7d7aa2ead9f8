#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fohs/error.hpp"
#include "fohs/matfrac.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using fohs::Complex;
using fohs::Matrix;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

const Matrix kA1 = m2(-0.1, 0.1, -2.0, -0.1);
const Matrix kA2 = m2(-0.01, 2.0, -0.1, -0.01);

fohs::ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const fohs::Error& e) {
        return e.kind();
    }
    FAIL("expected a fohs::Error");
    return fohs::ErrorKind::InvalidArgument;
}

} // namespace

TEST_CASE("spectral_decompose on small fixed matrices") {
    const auto diag = fohs::spectral_decompose(m2(-1, 0, 0, -4));
    const auto ev = fohs::sorted_eigenvalues(diag.eigenvalues);
    CHECK(std::abs(ev(0) - Complex(-4, 0)) < 1e-14);
    CHECK(std::abs(ev(1) - Complex(-1, 0)) < 1e-14);
    CHECK(diag.condition_estimate == doctest::Approx(1.0));

    const auto rot = fohs::sorted_eigenvalues(fohs::spectral_decompose(m2(0, 1, -1, 0)).eigenvalues);
    CHECK(std::abs(rot(0) - Complex(0, -1)) < 1e-14);
    CHECK(std::abs(rot(1) - Complex(0, 1)) < 1e-14);

    // lambda^2 + 0.2 lambda + 0.21
    const auto e1 = fohs::sorted_eigenvalues(fohs::spectral_decompose(kA1).eigenvalues);
    CHECK(std::abs(e1(0) - Complex(-0.1, -std::sqrt(0.2))) < 1e-12);
    CHECK(std::abs(e1(1) - Complex(-0.1, std::sqrt(0.2))) < 1e-12);
}

TEST_CASE("spectral_decompose residual and error kinds") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 50; ++k) {
        const Matrix a = gen::normal(rng, 4, 4);
        const auto d = fohs::spectral_decompose(a);
        const fohs::CMatrix r = a.cast<Complex>() * d.right_eigenvectors -
                                d.right_eigenvectors * d.eigenvalues.asDiagonal();
        CHECK(r.norm() <= 1e-10 * a.norm());
        CHECK(d.condition_estimate >= 1.0);
    }
    CHECK(kind_of([] { fohs::spectral_decompose(Matrix::Zero(2, 3)); }) == fohs::ErrorKind::NonSquare);
    CHECK(kind_of([] { fohs::spectral_decompose(m2(1, 1, 0, 1)); }) == fohs::ErrorKind::DefectiveMatrix);
}

TEST_CASE("frac_power fixed values") {
    CHECK((fohs::frac_power(Matrix::Identity(3, 3), 0.5).real() - Matrix::Identity(3, 3)).norm() < 1e-14);
    const Matrix p = fohs::frac_power(m2(1, 0, 0, 8), 2.0 / 3.0).real();
    CHECK((p - m2(1, 0, 0, 4)).cwiseAbs().maxCoeff() < 1e-12);

    const auto m = fohs::frac_power(-kA2, 1.0 / 1.4);
    REQUIRE(m.is_real);
    const Matrix back = fohs::frac_power(m.real(), 1.4).real();
    CHECK((back + kA2).cwiseAbs().maxCoeff() < 1e-8);

    // Cayley-Hamilton oracle for the same power
    oracle::M2 neg = -kA2;
    CHECK((m.real() - Matrix(oracle::power2(neg, 1.0 / 1.4))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("frac_power rejects the branch cut and defective input") {
    CHECK(kind_of([] { fohs::frac_power(m2(-1, 0, 0, 2), 0.5); }) == fohs::ErrorKind::BranchCutEigenvalue);
    CHECK(kind_of([] { fohs::frac_power(m2(0, 0, 0, 2), 0.5); }) == fohs::ErrorKind::BranchCutEigenvalue);
    CHECK(kind_of([] { fohs::frac_power(m2(2, 1, 0, 2), 0.5); }) == fohs::ErrorKind::DefectiveMatrix);
}

TEST_CASE("frac_power round trip on seeded Hurwitz 3x3 matrices") {
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Matrix a = gen::hurwitz(rng, 3);
        for (double e : {1.2, 1.4, 2.0}) {
            const Matrix root = fohs::frac_power(-a, 1.0 / e).real();
            const Matrix back = fohs::frac_power(root, e).real();
            worst = std::max(worst, (back + a).cwiseAbs().maxCoeff());
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("curly_a") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const Matrix a = gen::hurwitz(rng, 3);
        CHECK((fohs::curly_a(a, 1.0) - a).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK((fohs::curly_a(m2(-1, 0, 0, -8), 0.5) - m2(-1, 0, 0, -4)).cwiseAbs().maxCoeff() < 1e-12);

    // spectrum mapping against scalar principal powers
    for (double alpha : {0.3, 0.6, 0.9}) {
        const auto got = fohs::sorted_eigenvalues(fohs::eigenvalues(fohs::curly_a(kA1, alpha)));
        const auto lam = oracle::eig2(kA1);
        std::vector<Complex> want{oracle::curly_scalar(lam[0], alpha), oracle::curly_scalar(lam[1], alpha)};
        oracle::sort_lex(want);
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(got(i) - want[static_cast<std::size_t>(i)]) < 1e-9);
        }
    }
    for (int k = 0; k < 50; ++k) {
        const Matrix a = gen::hurwitz(rng, 3);
        const double alpha = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        const auto got = fohs::sorted_eigenvalues(fohs::eigenvalues(fohs::curly_a(a, alpha)));
        const auto lam = fohs::eigenvalues(a);
        std::vector<Complex> want;
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            want.push_back(oracle::curly_scalar(lam(i), alpha));
        }
        oracle::sort_lex(want);
        for (Eigen::Index i = 0; i < 3; ++i) {
            CHECK(std::abs(got(i) - want[static_cast<std::size_t>(i)]) < 1e-9);
        }
    }
    CHECK(kind_of([] { fohs::curly_a(kA1, 1.2); }) == fohs::ErrorKind::OrderOutOfRange);
}

TEST_CASE("folti_stability_margin") {
    CHECK(fohs::folti_stability_margin(m2(-1, 0, 0, -2), 1.0) == doctest::Approx(oracle::pi / 2));
    CHECK(fohs::folti_stability_margin(m2(0, 1, -1, 0), 0.5) == doctest::Approx(oracle::pi / 4));
    CHECK(fohs::folti_stability_margin(m2(0, 1, -1, 0), 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    for (double alpha : {0.2, 0.7, 1.0, 1.5}) {
        CHECK(fohs::folti_stability_margin(kA1, alpha) ==
              doctest::Approx(oracle::margin2(kA1, alpha)).epsilon(1e-12));
    }

    std::mt19937_64 rng(77);
    for (int k = 0; k < 100; ++k) {
        const Matrix a = gen::normal(rng, 3, 3);
        const Matrix t = gen::similarity(rng, 3);
        const Matrix b = t * a * t.inverse();
        CHECK(std::abs(fohs::folti_stability_margin(a, 0.8) - fohs::folti_stability_margin(b, 0.8)) < 1e-8);
    }

    CHECK(kind_of([] { fohs::FoLtiSystem(kA1, 2.0); }) == fohs::ErrorKind::OrderOutOfRange);
    CHECK(kind_of([] { fohs::FoLtiSystem(Matrix::Zero(2, 3), 0.5); }) == fohs::ErrorKind::NonSquare);
}
