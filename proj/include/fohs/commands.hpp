#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fohs/config.hpp"

namespace fohs {

enum class Command { AnalyzeSwitching, AnalyzeReset, BetaSweep, Simulate };

// Exit codes shared by every command.
inline constexpr int kExitStable = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitSubsystemUnstable = 3;

struct CommandResult {
    int exit_code = kExitError;
    std::string verdict;
    nlohmann::json report;           // also written to <out_dir>/report.json
    std::vector<std::string> files;  // everything written, relative to out_dir
};

// Runs one command on a validated config. Library errors propagate as fohs::Error.
CommandResult run_command(Command command, const ExperimentConfig& config);

const char* command_name(Command command) noexcept;

} // namespace fohs
