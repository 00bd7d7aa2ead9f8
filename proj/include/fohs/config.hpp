#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fohs/reset.hpp"
#include "fohs/sim.hpp"
#include "fohs/switching.hpp"

namespace fohs {

struct LoopConfig {
    CommensurateTransferFunction plant;
    CommensurateTransferFunction controller;
    CommensurateTransferFunction reset;
    std::optional<Eigen::Index> n_reset;
    double r = 0.0;
    std::vector<double> beta_row;

    [[nodiscard]] ResetControlSystem build() const;
};

struct SwitchingAnalysisConfig {
    double alpha = 0.0;
    std::vector<Matrix> modes;
    FrequencyGrid grid;
    VerdictOptions verdict;
    bool write_csv = true;
};

struct ResetAnalysisConfig {
    LoopConfig loop;
    double beta = 0.0;
    double p_r = 1.0;
    FrequencyGrid grid;
    SprOptions spr;
    bool certify = true;
    bool write_csv = true;
};

struct BetaSweepConfig {
    LoopConfig loop;
    FrequencyGrid grid;
    BetaSearchOptions search;
    bool write_csv = true;
};

struct SimulateSwitchedConfig {
    double alpha = 0.0;
    std::vector<Matrix> modes;
    SwitchingRule rule;
    std::vector<Vector> initial_conditions;
    SimOptions sim;
};

struct SimulateResetConfig {
    LoopConfig loop;
    std::optional<Vector> x0;
    ResetSimOptions sim;
};

using ConfigBody = std::variant<SwitchingAnalysisConfig, ResetAnalysisConfig, BetaSweepConfig,
                                SimulateSwitchedConfig, SimulateResetConfig>;

struct ExperimentConfig {
    std::string kind;
    std::string name;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    nlohmann::json effective;  // validated input with every default filled in
    ConfigBody body;
};

// Command-line values that replace the corresponding config entries.
struct ConfigOverrides {
    std::optional<std::filesystem::path> out_dir;
    std::optional<FrequencyGrid> grid;
    std::optional<std::uint64_t> seed;
};

// Strict validation: unknown fields, wrong types and out-of-range values raise
// ErrorKind::Schema with the JSON pointer and source line of the offending field.
ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

// "wmin,wmax,N"
FrequencyGrid parse_grid_spec(const std::string& spec);

std::vector<std::string> config_kinds();

// JSON Schema (draft 2020-12) generated from the same field tables the
// validator uses. Ragged matrices are only caught by the validator.
nlohmann::json experiment_schema();

} // namespace fohs
