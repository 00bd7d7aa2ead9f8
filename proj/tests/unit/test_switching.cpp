#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "fohs/error.hpp"
#include "fohs/switching.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using fohs::Matrix;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

const Matrix kEx1A1 = m2(-0.1, 0.1, -2.0, -0.1);
const Matrix kEx1A2 = m2(-0.01, 2.0, -0.1, -0.01);
const Matrix kEx2A1 = m2(-0.2, -1.0, 0.01, -0.1);
const Matrix kEx2A2 = m2(-0.3, 0.01, -1.0, -0.1);

} // namespace

TEST_CASE("frequency grid") {
    const fohs::FrequencyGrid g{1e-2, 1e2, 5};
    const auto w = g.omegas();
    REQUIRE(w.size() == 5);
    CHECK(w[0] == 1e-2);
    CHECK(w[2] == doctest::Approx(1.0));
    CHECK(w[4] == 1e2);
    CHECK_THROWS_AS((fohs::FrequencyGrid{1.0, 0.5, 10}.validate()), fohs::Error);
    CHECK_THROWS_AS((fohs::FrequencyGrid{0.0, 1.0, 10}.validate()), fohs::Error);
    CHECK_THROWS_AS((fohs::FrequencyGrid{1.0, 2.0, 1}.validate()), fohs::Error);
}

TEST_CASE("phase curve of a diagonal mode follows the closed form") {
    // det(A - jw) = (1 + jw)(2 + jw) for A = diag(-1, -2)
    const fohs::FrequencyGrid grid{1e-3, 1e3, 400};
    const auto w = grid.omegas();
    const auto curve = fohs::phase_curve_low(m2(-1, 0, 0, -2), 1.0, w);
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(curve[i] == doctest::Approx(std::atan(w[i]) + std::atan(w[i] / 2.0)).epsilon(1e-12));
    }
    // continuity across the principal-value jump of a 3-state mode
    Matrix a3 = Matrix::Zero(3, 3);
    a3.diagonal() << -1.0, -2.0, -3.0;
    const auto c3 = fohs::phase_curve_low(a3, 1.0, w);
    // det A < 0 anchors the branch at pi
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double want = oracle::pi + std::atan(w[i]) + std::atan(w[i] / 2.0) + std::atan(w[i] / 3.0);
        CHECK(c3[i] == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("high formulation at alpha = 1 is the squared low determinant") {
    std::mt19937_64 rng(21);
    const auto w = fohs::FrequencyGrid{1e-4, 1e4, 500}.omegas();
    for (int k = 0; k < 30; ++k) {
        const Matrix a = gen::hurwitz(rng, 3);
        const Matrix b = gen::hurwitz(rng, 3);
        const auto low_a = fohs::phase_curve_low(a, 1.0, w);
        const auto high_a = fohs::phase_curve_high(a, 1.0, w);
        const auto low_b = fohs::phase_curve_low(b, 1.0, w);
        const auto high_b = fohs::phase_curve_high(b, 1.0, w);
        // the curves agree up to the branch anchor, a fixed multiple of 2 pi
        const double offset = high_a[0] - 2.0 * low_a[0];
        CHECK(std::abs(offset / (2.0 * oracle::pi) - std::round(offset / (2.0 * oracle::pi))) < 1e-12);
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(std::abs(high_a[i] - 2.0 * low_a[i] - offset) < 1e-9);
            CHECK(std::abs((high_a[i] - high_b[i]) - 2.0 * (low_a[i] - low_b[i])) < 1e-9);
        }
    }
}

TEST_CASE("sweep symmetry") {
    std::mt19937_64 rng(4);
    for (double alpha : {0.4, 1.0, 1.3}) {
        for (int k = 0; k < 10; ++k) {
            const oracle::M2 a1 = oracle::random_companion_with_margin(rng, alpha);
            const oracle::M2 a2 = oracle::random_companion_with_margin(rng, alpha);
            const auto s12 = fohs::phase_difference_sweep(a1, a2, alpha, {1e-4, 1e4, 300});
            const auto s21 = fohs::phase_difference_sweep(a2, a1, alpha, {1e-4, 1e4, 300});
            for (std::size_t i = 0; i < s12.diffs.size(); ++i) {
                CHECK(std::abs(s12.diffs[i] - s21.diffs[i]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("grid refinement does not lower the sweep maximum") {
    struct Case {
        Matrix a1, a2;
        double alpha;
    };
    const Case cases[] = {{kEx1A1, kEx1A2, 0.3}, {kEx1A1, kEx1A2, 0.6}, {kEx1A1, kEx1A2, 0.9},
                          {kEx2A1, kEx2A2, 1.3}, {kEx2A1, kEx2A2, 1.6}};
    for (const auto& c : cases) {
        const double coarse = fohs::phase_difference_sweep(c.a1, c.a2, c.alpha, {1e-4, 1e4, 2000}).max_diff;
        const double fine = fohs::phase_difference_sweep(c.a1, c.a2, c.alpha, {1e-4, 1e4, 3999}).max_diff;
        CHECK(fine >= coarse - 1e-6);
    }
}

TEST_CASE("sweep rejects unstable or mismatched modes") {
    CHECK_THROWS_AS(fohs::phase_difference_sweep(kEx1A1, m2(0.5, 1, -1, 0.5), 0.9), fohs::Error);
    try {
        fohs::phase_difference_sweep(kEx1A1, m2(0.5, 1, -1, 0.5), 0.9);
    } catch (const fohs::Error& e) {
        CHECK(e.kind() == fohs::ErrorKind::SubsystemUnstable);
    }
    CHECK_THROWS_AS(fohs::phase_difference_sweep(kEx1A1, Matrix::Identity(3, 3) * -1.0, 0.5), fohs::Error);
}

TEST_CASE("verdicts") {
    const fohs::SwitchedSystem unstable({kEx1A1, m2(0.5, 1, -1, 0.5)}, 0.9);
    const auto v = fohs::switching_stability_verdict(unstable);
    CHECK(v.verdict == fohs::Verdict::SubsystemUnstable);
    REQUIRE(v.unstable_mode.has_value());
    CHECK(*v.unstable_mode == 1);

    const fohs::SwitchedSystem easy({m2(-1, 0.2, 0, -2), m2(-2, 0, 0.1, -1)}, 0.7);
    const auto ok = fohs::switching_stability_verdict(easy);
    CHECK(ok.verdict == fohs::Verdict::QuadraticallyStable);
    REQUIRE(ok.certificate.has_value());
    CHECK(ok.certificate->accepted);

    // three modes: every unordered pair is reported
    const fohs::SwitchedSystem three({m2(-1, 0, 0, -2), m2(-2, 0, 0, -1), m2(-1.5, 0.1, 0, -1.2)}, 0.5);
    CHECK(fohs::switching_stability_verdict(three, {1e-3, 1e3, 200}).pairs.size() == 3);
}

TEST_CASE("QuadraticallyStable implies a common P on the companion corpus") {
    std::mt19937_64 rng(2718);
    int stable = 0;
    for (int k = 0; k < 40; ++k) {
        const oracle::M2 c1 = oracle::random_stable_companion(rng);
        const oracle::M2 c2 = oracle::random_stable_companion(rng);
        const double alpha = 0.5;
        const Matrix a1 = -oracle::power2(-c1, 2.0 - alpha);
        const Matrix a2 = -oracle::power2(-c2, 2.0 - alpha);
        const fohs::SwitchedSystem sys({a1, a2}, alpha);
        fohs::VerdictOptions phase_only;
        phase_only.certify = false;
        const auto v = fohs::switching_stability_verdict(sys, {1e-4, 1e4, 1000}, phase_only);
        if (v.verdict == fohs::Verdict::QuadraticallyStable) {
            ++stable;
            CHECK(fohs::find_common_p(sys).found());
        }
    }
    CHECK(stable > 0);
}

TEST_CASE("sweep csv") {
    const auto dir = std::filesystem::temp_directory_path() / "fohs_test_switching";
    std::filesystem::create_directories(dir);
    const auto sweep = fohs::phase_difference_sweep(kEx1A1, kEx1A2, 0.5, {1e-2, 1e2, 10});
    fohs::write_sweep_csv(sweep, dir / "s.csv");
    std::ifstream in(dir / "s.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "omega,arg1,arg2,absdiff");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
    }
    CHECK(rows == 10);
    std::filesystem::remove_all(dir);
}
