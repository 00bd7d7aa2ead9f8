#include <doctest.h>

#include <fstream>
#include <string>
#include <variant>

#include "fohs/config.hpp"
#include "fohs/error.hpp"

namespace {

std::string schema_error(const std::string& text, const fohs::ConfigOverrides& o = {}) {
    try {
        fohs::parse_config(text, o);
    } catch (const fohs::Error& e) {
        CHECK(e.kind() == fohs::ErrorKind::Schema);
        return e.detail();
    }
    FAIL("expected a schema error");
    return {};
}

const char* kSwitching = R"({
  "kind": "switching-analysis",
  "alpha": 0.5,
  "modes": [[[-1, 0], [0, -2]], [[-2, 0], [0, -1]]]
})";

} // namespace

TEST_CASE("defaults are filled in") {
    const auto cfg = fohs::parse_config(kSwitching);
    CHECK(cfg.kind == "switching-analysis");
    CHECK(cfg.seed == 0);
    CHECK(cfg.out_dir == "fohs-out");
    const auto& body = std::get<fohs::SwitchingAnalysisConfig>(cfg.body);
    CHECK(body.alpha == 0.5);
    CHECK(body.modes.size() == 2);
    CHECK(body.grid.points == 2000);
    CHECK(body.grid.omega_min == 1e-4);
    CHECK(body.verdict.band == 0.02);
    CHECK(body.verdict.certify);
    CHECK(cfg.effective["grid"]["omega_max"] == 1e4);
    CHECK(cfg.effective["search"]["max_iter"] == 5000);

    // the effective config parses to itself
    const auto again = fohs::parse_config(cfg.effective.dump());
    CHECK(again.effective == cfg.effective);
}

TEST_CASE("overrides") {
    fohs::ConfigOverrides o;
    o.out_dir = "elsewhere";
    o.seed = 9;
    o.grid = fohs::parse_grid_spec("0.01,100,50");
    const auto cfg = fohs::parse_config(kSwitching, o);
    CHECK(cfg.out_dir == "elsewhere");
    CHECK(cfg.seed == 9);
    const auto& body = std::get<fohs::SwitchingAnalysisConfig>(cfg.body);
    CHECK(body.grid.points == 50);
    CHECK(body.grid.omega_max == 100.0);
    CHECK(cfg.effective["grid"]["points"] == 50);

    CHECK_THROWS_AS(fohs::parse_grid_spec("1,2"), fohs::Error);
    CHECK_THROWS_AS(fohs::parse_grid_spec("2,1,10"), fohs::Error);
    CHECK_THROWS_AS(fohs::parse_grid_spec("a,b,c"), fohs::Error);
}

TEST_CASE("schema violations carry pointer and line") {
    const std::string ragged = R"({
  "kind": "switching-analysis",
  "alpha": 0.5,
  "modes": [[[-1, 0], [0]], [[-2, 0], [0, -1]]]
})";
    const auto msg = schema_error(ragged);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("/modes/0") != std::string::npos);

    const std::string unknown = R"({
  "kind": "switching-analysis",
  "alpha": 0.5,
  "colour": "red",
  "modes": [[[-1, 0], [0, -2]]]
})";
    const auto u = schema_error(unknown);
    CHECK(u.find("line 4") != std::string::npos);
    CHECK(u.find("colour") != std::string::npos);

    CHECK(schema_error(R"({"kind": "switching-analysis", "alpha": 2.0, "modes": [[[-1]]]})").find("/alpha") !=
          std::string::npos);
    CHECK(schema_error(R"({"kind": "nonsense"})").find("/kind") != std::string::npos);
    CHECK(schema_error(R"({"kind": "switching-analysis", "alpha": 0.5})").find("/modes") != std::string::npos);
    CHECK(schema_error("{ not json").find("malformed") != std::string::npos);
    CHECK(schema_error(R"({"kind": "simulate-switched", "alpha": 0.5, "modes": [[[-1]]],
        "rule": {"kind": "arbitrary"}, "initial_conditions": [[1]], "h": 0.1, "horizon": 0})")
              .find("/horizon") != std::string::npos);

    fohs::ConfigOverrides grid;
    grid.grid = fohs::parse_grid_spec("0.1,10,20");
    schema_error(R"({"kind": "simulate-switched", "alpha": 0.5, "modes": [[[-1]]],
        "rule": {"kind": "arbitrary"}, "initial_conditions": [[1]], "h": 0.1, "horizon": 1})",
                 grid);
}

TEST_CASE("reset configs build loops") {
    const auto cfg = fohs::parse_config(R"({
  "kind": "beta-sweep",
  "loop": {
    "plant": {"order": 1, "num": [1], "den": [0, 0.2, 1]},
    "controller": {"order": 1, "num": [1, 1], "den": [1]},
    "reset": {"order": 0.5, "num": [1], "den": [0, 1]}
  }
})");
    const auto& body = std::get<fohs::BetaSweepConfig>(cfg.body);
    const auto sys = body.loop.build();
    CHECK(sys.alpha == 0.5);
    CHECK(sys.dims.total() == 5);
    CHECK(body.search.beta_lo == -5.0);
    CHECK(body.search.step == 0.01);
    CHECK(cfg.effective["band"] == 0.0);

    CHECK(schema_error(R"({"kind": "beta-sweep", "loop": {
        "plant": {"order": 1.5, "num": [1], "den": [0, 1]},
        "controller": {"order": 1, "num": [1], "den": [1]},
        "reset": {"order": 1, "num": [1], "den": [1, 1]}}})")
              .find("/loop/plant/order") != std::string::npos);
}

TEST_CASE("every bundled config validates") {
    for (const char* name : {"example1_a05.json", "example1_a06.json", "example1_a09.json", "example2.json",
                             "example3_fore.json", "example3_fci.json", "example3_ci.json",
                             "example3_fore_beta05.json", "example1_portrait.json", "example3_fore_sim.json"}) {
        CAPTURE(name);
        CHECK_NOTHROW(fohs::load_config(std::string(FOHS_CONFIG_DIR) + "/" + name));
    }
}

TEST_CASE("published schema matches the validator tables") {
    std::ifstream in(FOHS_SCHEMA_FILE);
    REQUIRE(in.good());
    const auto published = nlohmann::json::parse(in);
    CHECK(published == fohs::experiment_schema());
    REQUIRE(published["oneOf"].size() == fohs::config_kinds().size());
}
