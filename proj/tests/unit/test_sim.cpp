#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "fohs/error.hpp"
#include "fohs/sim.hpp"
#include "oracles.hpp"

using fohs::Matrix;
using fohs::Vector;

namespace {

Matrix m2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

const Matrix kEx1A1 = m2(-0.1, 0.1, -2.0, -0.1);
const Matrix kEx1A2 = m2(-0.01, 2.0, -0.1, -0.01);

const fohs::CommensurateTransferFunction kPlant{1.0, {1.0}, {0.0, 0.2, 1.0}};
const fohs::CommensurateTransferFunction kController{1.0, {1.0, 1.0}, {1.0}};
const fohs::CommensurateTransferFunction kFore{1.0, {1.0}, {1.0, 1.0}};

fohs::SwitchingRule quadrant_rule(double sign, std::uint64_t seed) {
    fohs::SwitchingRule rule;
    rule.kind = fohs::SwitchingRule::Kind::StateRegions;
    rule.q = sign * m2(0.0, 0.5, 0.5, 0.0);
    rule.band = 0.1;
    rule.seed = seed;
    return rule;
}

fohs::ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const fohs::Error& e) {
        return e.kind();
    }
    FAIL("expected a fohs::Error");
    return fohs::ErrorKind::InvalidArgument;
}

struct GlError {
    double max;
    double at_horizon;
};

GlError scalar_gl_error(double alpha, double h, double horizon) {
    const fohs::SwitchedSystem sys({Matrix::Constant(1, 1, -1.0)}, alpha);
    fohs::SimOptions o;
    o.h = h;
    o.horizon = horizon;
    const auto t = fohs::simulate_switched(sys, {}, Vector::Ones(1), o);
    GlError err{0.0, 0.0};
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        const double exact = oracle::mittag_leffler_half(-std::pow(t.times[k], alpha));
        err.max = std::max(err.max, std::abs(t.states[k](0) - exact));
        err.at_horizon = std::abs(t.states[k](0) - exact);
    }
    return err;
}

} // namespace

TEST_CASE("GL coefficients") {
    const auto one = fohs::gl_coefficients(1.0, 5);
    CHECK(one[0] == 1.0);
    CHECK(one[1] == -1.0);
    CHECK(one[2] == 0.0);
    CHECK(one[4] == 0.0);
    for (double a : {0.3, 0.7, 1.4}) {
        const auto c = fohs::gl_coefficients(a, 12);
        for (std::size_t j = 0; j < c.size(); ++j) {
            // (-1)^j Gamma(a+1) / (Gamma(j+1) Gamma(a-j+1))
            const double g = std::tgamma(a + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(a - j + 1.0));
            CHECK(c[j] == doctest::Approx((j % 2 ? -1.0 : 1.0) * g).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(fohs::gl_coefficients(0.5, 0), fohs::Error);
}

TEST_CASE("Mittag-Leffler against closed forms") {
    for (double z = -8.0; z <= 3.0; z += 0.25) {
        CHECK(fohs::mittag_leffler(0.5, z) == doctest::Approx(oracle::mittag_leffler_half(z)).epsilon(1e-7));
        CHECK(fohs::mittag_leffler(1.0, z) == doctest::Approx(std::exp(z)).epsilon(1e-14));
    }
    CHECK(fohs::mittag_leffler(2.0, -4.0) == doctest::Approx(std::cos(2.0)));
    CHECK(fohs::mittag_leffler(0.5, -25.0) == doctest::Approx(oracle::mittag_leffler_half(-25.0)).epsilon(1e-7));
    CHECK(fohs::mittag_leffler(0.5, 0.0) == 1.0);
    CHECK(fohs::mittag_leffler(1.0, -1.0) == doctest::Approx(0.36787944117144233));
    CHECK(fohs::mittag_leffler(2.0, -1.0) == doctest::Approx(std::cos(1.0)));
    // alpha near 1 must agree with the exponential
    CHECK(fohs::mittag_leffler(0.999999, -3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-5));
    CHECK(kind_of([] { fohs::mittag_leffler(0.5, -60.0); }) == fohs::ErrorKind::ConvergenceFailure);
}

TEST_CASE("GL at alpha = 1 is forward Euler") {
    const Matrix a = m2(-0.5, 1.0, -1.0, -0.2);
    const fohs::SwitchedSystem sys({a}, 1.0);
    fohs::SimOptions o;
    o.h = 0.01;
    o.horizon = 2.0;
    const auto t = fohs::simulate_switched(sys, {}, v2(1.0, -0.5), o);
    Vector x = v2(1.0, -0.5);
    for (std::size_t k = 1; k < t.states.size(); ++k) {
        x = x + o.h * (a * x);
        CHECK((t.states[k] - x).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("scalar GL converges to the Mittag-Leffler solution") {
    const auto e1 = scalar_gl_error(0.5, 1e-3, 5.0);
    const auto e2 = scalar_gl_error(0.5, 5e-4, 5.0);
    CHECK(e1.max < 1e-2);
    // first order away from the t^alpha layer at the origin
    CHECK(e1.at_horizon / e2.at_horizon >= 1.7);
    // the layer itself shrinks like h^alpha
    CHECK(e1.max / e2.max >= 1.25);
}

TEST_CASE("determinism and per-run seeds") {
    const fohs::SwitchedSystem sys({kEx1A1, kEx1A2}, 0.6);
    fohs::SwitchingRule arbitrary;
    arbitrary.seed = 42;
    arbitrary.dwell = 7;
    fohs::SimOptions o;
    o.h = 0.05;
    o.horizon = 20.0;
    for (const auto& rule : {arbitrary, quadrant_rule(1.0, 42)}) {
        const auto a = fohs::simulate_switched(sys, rule, v2(1.0, 0.0), o);
        const auto b = fohs::simulate_switched(sys, rule, v2(1.0, 0.0), o);
        REQUIRE(a.states.size() == b.states.size());
        for (std::size_t k = 0; k < a.states.size(); ++k) {
            CHECK(a.states[k] == b.states[k]);
            CHECK(a.active_mode[k] == b.active_mode[k]);
        }
        CHECK(a.events.size() == b.events.size());
    }
    const auto runs = fohs::simulate_portrait(sys, arbitrary, {v2(1, 0), v2(0, 1), v2(-1, 0)}, o);
    REQUIRE(runs.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        auto r = arbitrary;
        r.seed = arbitrary.seed + i;
        const auto single = fohs::simulate_switched(sys, r, runs[i].states.front(), o);
        CHECK(single.states.back() == runs[i].states.back());
    }
}

TEST_CASE("switch events follow the active mode") {
    const fohs::SwitchedSystem sys({kEx1A1, kEx1A2}, 0.6);
    fohs::SimOptions o;
    o.h = 0.05;
    o.horizon = 30.0;
    const auto t = fohs::simulate_switched(sys, quadrant_rule(1.0, 3), v2(1.0, 0.3), o);
    std::size_t switches = 0;
    for (std::size_t k = 1; k < t.active_mode.size(); ++k) {
        switches += t.active_mode[k] != t.active_mode[k - 1] ? 1U : 0U;
    }
    CHECK(switches == t.events.size());
    CHECK(switches > 0);
}

TEST_CASE("reversed region rule drives Example 1 away at alpha = 0.9") {
    const fohs::SwitchedSystem sys({kEx1A1, kEx1A2}, 0.9);
    fohs::SimOptions o;
    o.h = 0.05;
    o.horizon = 200.0;
    const auto t = fohs::simulate_switched(sys, quadrant_rule(-1.0, 1), v2(1.0, 0.0), o);
    CHECK(t.states.back().norm() > 10.0);
}

TEST_CASE("reset simulation") {
    auto sys = fohs::build_closed_loop(kPlant, kController, kFore, 1.0);
    fohs::ResetSimOptions o;
    o.h = 1e-3;
    o.horizon = 15.0;
    const auto t = fohs::simulate_reset(sys, Vector::Zero(3), o);
    REQUIRE_FALSE(t.events.empty());
    for (const auto& e : t.events) {
        CHECK(e.kind == fohs::EventKind::Reset);
        CHECK(e.post(2) == 0.0);
        CHECK(e.post.head(2) == e.pre.head(2));
        CHECK(e.pre(2) != 0.0);
    }

    fohs::ResetSimOptions retain = o;
    retain.memory = fohs::MemoryMode::Retain;
    CHECK_FALSE(fohs::simulate_reset(sys, Vector::Zero(3), retain).events.empty());

    fohs::ResetSimOptions zeno = o;
    zeno.zeno_limit = 0;
    CHECK(kind_of([&] { fohs::simulate_reset(sys, Vector::Zero(3), zeno); }) == fohs::ErrorKind::ZenoGuard);
}

TEST_CASE("a loop without reset states matches the plain simulation") {
    auto sys = fohs::build_closed_loop(kPlant, kController, {0.5, {1.0}, {1.0, 1.0}}, 0.0, 0);
    CHECK(sys.a_r == Matrix::Identity(sys.dims.total(), sys.dims.total()));
    fohs::ResetSimOptions o;
    o.h = 1e-2;
    o.horizon = 10.0;
    Vector x0 = Vector::Zero(sys.dims.total());
    x0(0) = 1.0;
    const auto r = fohs::simulate_reset(sys, x0, o);
    const auto p = fohs::simulate_switched(fohs::SwitchedSystem({sys.a_cl}, sys.alpha), {}, x0, o);
    CHECK(r.events.empty());
    REQUIRE(r.states.size() == p.states.size());
    for (std::size_t k = 0; k < r.states.size(); ++k) {
        CHECK((r.states[k] - p.states[k]).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("simulation input errors") {
    const fohs::SwitchedSystem sys({kEx1A1, kEx1A2}, 0.6);
    fohs::SimOptions o;
    o.h = 0.05;
    o.horizon = 0.0;
    CHECK(kind_of([&] { fohs::simulate_switched(sys, {}, v2(1, 0), o); }) == fohs::ErrorKind::InvalidArgument);
    o.horizon = 10.0;
    o.h = 5.0;
    CHECK(kind_of([&] { fohs::simulate_switched(sys, {}, v2(1, 0), o); }) == fohs::ErrorKind::StepTooLarge);
    o.h = 0.05;
    CHECK(kind_of([&] { fohs::simulate_switched(sys, {}, Vector::Ones(3), o); }) ==
          fohs::ErrorKind::DimensionMismatch);
    fohs::SwitchingRule bad = quadrant_rule(1.0, 0);
    bad.band = -1.0;
    CHECK_THROWS_AS(fohs::simulate_switched(sys, bad, v2(1, 0), o), fohs::Error);
    fohs::SwitchingRule no_region;
    no_region.kind = fohs::SwitchingRule::Kind::StateRegions;
    CHECK_THROWS_AS(fohs::simulate_switched(sys, no_region, v2(1, 0), o), fohs::Error);
}

TEST_CASE("trajectory csv") {
    const auto dir = std::filesystem::temp_directory_path() / "fohs_test_sim";
    const fohs::SwitchedSystem sys({kEx1A1, kEx1A2}, 0.6);
    fohs::SimOptions o;
    o.h = 0.1;
    o.horizon = 1.0;
    const auto runs = fohs::simulate_portrait(sys, quadrant_rule(1.0, 0), {v2(1, 0), v2(0, 1)}, o);
    const auto names = fohs::write_portrait(runs, dir);
    REQUIRE(names.size() == 2);
    std::ifstream traj(dir / names[0]);
    std::string line;
    std::getline(traj, line);
    CHECK(line == "t,x1,x2,y,active_mode,event");
    std::ifstream index(dir / "index.csv");
    std::getline(index, line);
    CHECK(line == "index,file,x0_1,x0_2,final_norm");
    std::filesystem::remove_all(dir);
}
