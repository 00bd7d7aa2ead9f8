#include "fohs/commands.hpp"

#include <chrono>
#include <fstream>

#include "fohs/csv.hpp"
#include "fohs/error.hpp"

namespace fohs {

using nlohmann::json;

namespace {

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

template <class V>
json to_json_vec(const V& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

// NaN has no JSON representation.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

const char* expected_kind(Command c) {
    switch (c) {
    case Command::AnalyzeSwitching:
        return "switching-analysis";
    case Command::AnalyzeReset:
        return "reset-analysis";
    case Command::BetaSweep:
        return "beta-sweep";
    case Command::Simulate:
        return "simulate-switched or simulate-reset";
    }
    return "";
}

json loop_json(const ResetControlSystem& sys) {
    return {{"alpha", sys.alpha},
            {"a_cl", to_json(sys.a_cl)},
            {"b_cl", to_json_vec(sys.b_cl)},
            {"c_cl", to_json_vec(sys.c_cl)},
            {"a_r", to_json(sys.a_r)},
            {"dims", {{"n_p", sys.dims.n_p}, {"n_c", sys.dims.n_c}, {"n_r", sys.dims.n_r}, {"n_reset", sys.dims.n_reset}}},
            {"r", sys.r},
            {"beta_row", to_json_vec(sys.effective_beta_row())}};
}

void write_events_csv(const std::vector<const Trajectory*>& runs, const std::filesystem::path& path) {
    const Eigen::Index n = runs.empty() || runs.front()->states.empty() ? 0 : runs.front()->states.front().size();
    std::vector<std::string> header{"run", "t", "step", "kind"};
    for (const char* side : {"pre_", "post_"}) {
        for (Eigen::Index i = 0; i < n; ++i) {
            header.push_back(side + std::to_string(i + 1));
        }
    }
    CsvWriter csv(path, header);
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (const auto& e : runs[r]->events) {
            std::vector<CsvWriter::Cell> row{static_cast<long long>(r), e.time, static_cast<long long>(e.step),
                                             std::string(to_string(e.kind))};
            for (Eigen::Index i = 0; i < n; ++i) {
                row.emplace_back(e.pre(i));
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                row.emplace_back(e.post(i));
            }
            csv.row(row);
        }
    }
}

double max_norm(const Trajectory& t) {
    double m = 0.0;
    for (const auto& x : t.states) {
        m = std::max(m, x.norm());
    }
    return m;
}

const char* kInitNote = "Caputo-style initial condition: the scheme integrates the deviation from x0";

void analyze_switching(const SwitchingAnalysisConfig& c, const std::filesystem::path& out, CommandResult& res) {
    const SwitchedSystem sys(c.modes, c.alpha);
    const SwitchingVerdict v = switching_stability_verdict(sys, c.grid, c.verdict);

    json pairs = json::array();
    for (const auto& p : v.pairs) {
        pairs.push_back({{"modes", {p.first, p.second}}, {"max_diff", p.max_diff}, {"argmax_omega", p.argmax_omega}});
        if (c.write_csv) {
            const auto sweep = phase_difference_sweep(sys.modes[p.first], sys.modes[p.second], sys.alpha, c.grid);
            const std::string name = "sweep_" + std::to_string(p.first + 1) + "_" + std::to_string(p.second + 1) + ".csv";
            write_sweep_csv(sweep, out / name);
            res.files.push_back(name);
        }
    }
    json cert = nullptr;
    if (v.certificate) {
        cert = {{"p", to_json(v.certificate->p_matrix)},
                {"margins", v.certificate->margins},
                {"p_min_eig", v.certificate->p_min_eig}};
    }
    res.report["evidence"] = {
        {"alpha", c.alpha},
        {"mode_margins", v.mode_margins},
        {"unstable_mode", v.unstable_mode ? json(*v.unstable_mode) : json(nullptr)},
        {"pairs", pairs},
        {"threshold", kPi / 2.0},
        {"band", c.verdict.band},
        {"phase_test_passed", v.phase_test_passed},
        {"certify", c.verdict.certify},
        {"certificate", cert},
        {"search_iterations", v.search_iterations},
        {"note", "phase criterion only; no SPR claim is made for switched systems"}};

    res.verdict = to_string(v.verdict);
    res.exit_code = v.verdict == Verdict::QuadraticallyStable ? kExitStable
                    : v.verdict == Verdict::SubsystemUnstable ? kExitSubsystemUnstable
                                                               : kExitInconclusive;
}

void analyze_reset(const ResetAnalysisConfig& c, const std::filesystem::path& out, CommandResult& res) {
    const ResetControlSystem sys = c.loop.build();
    const HBetaTable table(sys, c.grid);
    const HBetaResult h = table.check(c.beta, c.p_r, c.spr);

    json warnings = json::array();
    if (!sys.beta_row_is_surface_row()) {
        warnings.push_back("beta_row differs from the reset-surface row; a certificate built on it need not "
                           "satisfy the jump condition");
    }
    if (sys.alpha <= 2.0 / 3.0) {
        warnings.push_back("alpha <= 2/3: the flow condition is applied through the A-transform Lyapunov test");
    }

    json cert = nullptr;
    if (c.certify && h.is_spr && sys.dims.n_reset == 1) {
        const auto p = find_reset_certificate(sys, c.beta, c.p_r);
        cert = {{"found", p.has_value()}};
        if (p) {
            const auto rep = verify_reset_certificate(sys, *p);
            cert["p"] = to_json(*p);
            cert["flow_margin"] = rep.flow_margin;
            cert["jump_margin_surface"] = rep.jump_margin_surface;
            cert["jump_margin_full"] = rep.jump_margin_full;
            cert["jump_margin_reset_subspace"] = rep.jump_margin_reset_subspace;
            cert["p_min_eig"] = rep.p_min_eig;
            cert["implied_beta"] = rep.implied_beta ? json(*rep.implied_beta) : json(nullptr);
            cert["implied_p_r"] = rep.implied_p_r ? json(*rep.implied_p_r) : json(nullptr);
        }
    }

    if (c.write_csv) {
        write_hbeta_curve_csv(table, c.beta, c.p_r, out / "hbeta_curve.csv");
        res.files.push_back("hbeta_curve.csv");
    }
    res.report["evidence"] = {{"closed_loop", loop_json(sys)},
                              {"spr",
                               {{"beta", h.beta},
                                {"p_r", h.p_r},
                                {"is_spr", h.is_spr},
                                {"hurwitz", h.hurwitz},
                                {"asymptotic_ok", h.asymptotic_ok},
                                {"min_phase_margin", num(h.min_phase_margin)},
                                {"argmax_omega", h.argmax_omega},
                                {"band", c.spr.band}}},
                              {"certificate", cert},
                              {"warnings", warnings}};
    res.verdict = h.is_spr ? "SPR-certified" : "Inconclusive";
    res.exit_code = h.is_spr ? kExitStable : kExitInconclusive;
}

void beta_sweep(const BetaSweepConfig& c, const std::filesystem::path& out, CommandResult& res) {
    const ResetControlSystem sys = c.loop.build();
    const BetaSearchResult r = beta_range_search(sys, c.grid, c.search);

    json intervals = json::array();
    for (const auto& iv : r.intervals) {
        intervals.push_back({{"lower", iv.lower()},
                             {"upper", iv.upper()},
                             {"lower_bracket", {iv.lower_outside, iv.lower_inside}},
                             {"upper_bracket", {iv.upper_inside, iv.upper_outside}},
                             {"lower_at_limit", iv.lower_at_limit},
                             {"upper_at_limit", iv.upper_at_limit}});
    }
    if (c.write_csv) {
        write_beta_csv(r, out / "beta_sweep.csv");
        res.files.push_back("beta_sweep.csv");
    }
    res.report["evidence"] = {{"closed_loop", loop_json(sys)},
                              {"hurwitz", r.hurwitz},
                              {"intervals", intervals},
                              {"range",
                               {{"lo", c.search.beta_lo},
                                {"hi", c.search.beta_hi},
                                {"step", c.search.step},
                                {"width", c.search.width}}},
                              {"p_r", c.search.p_r},
                              {"band", c.search.spr.band}};
    res.verdict = r.intervals.empty() ? "Inconclusive" : "StableRangeFound";
    res.exit_code = r.intervals.empty() ? kExitInconclusive : kExitStable;
}

void simulate_switched_cmd(const SimulateSwitchedConfig& c, const std::filesystem::path& out, CommandResult& res) {
    const SwitchedSystem sys(c.modes, c.alpha);
    const auto runs = simulate_portrait(sys, c.rule, c.initial_conditions, c.sim);
    const auto names = write_portrait(runs, out);
    res.files.insert(res.files.end(), names.begin(), names.end());
    res.files.push_back("index.csv");

    std::vector<const Trajectory*> ptrs;
    json summary = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        ptrs.push_back(&runs[i]);
        summary.push_back({{"file", names[i]},
                           {"x0", to_json_vec(c.initial_conditions[i])},
                           {"seed", c.rule.seed + i},
                           {"final_norm", runs[i].states.back().norm()},
                           {"max_norm", max_norm(runs[i])},
                           {"switches", runs[i].events.size()}});
    }
    write_events_csv(ptrs, out / "events.csv");
    res.files.push_back("events.csv");

    res.report["evidence"] = {{"runs", summary},
                              {"steps", runs.empty() ? 0 : runs.front().times.size() - 1},
                              {"initialization", kInitNote}};
    res.verdict = "Completed";
    res.exit_code = kExitStable;
}

void simulate_reset_cmd(const SimulateResetConfig& c, const std::filesystem::path& out, CommandResult& res) {
    const ResetControlSystem sys = c.loop.build();
    const Vector x0 = c.x0.value_or(Vector::Zero(sys.dims.total()));
    const Trajectory t = simulate_reset(sys, x0, c.sim);
    write_trajectory_csv(t, out / "trajectory.csv");
    write_events_csv({&t}, out / "events.csv");
    res.files.insert(res.files.end(), {"trajectory.csv", "events.csv"});

    double max_out = 0.0;
    for (double y : t.outputs) {
        max_out = std::max(max_out, std::abs(y));
    }
    res.report["evidence"] = {
        {"closed_loop", loop_json(sys)},
        {"resets", t.events.size()},
        {"first_reset_time", t.events.empty() ? json(nullptr) : json(t.events.front().time)},
        {"final_output", t.outputs.back()},
        {"final_error", sys.r - t.outputs.back()},
        {"max_abs_output", max_out},
        {"final_state_norm", t.states.back().norm()},
        {"memory", c.sim.memory == MemoryMode::ClearResetStates ? "clear" : "retain"},
        {"initialization", kInitNote}};
    res.verdict = "Completed";
    res.exit_code = kExitStable;
}

} // namespace

const char* command_name(Command command) noexcept {
    switch (command) {
    case Command::AnalyzeSwitching:
        return "analyze-switching";
    case Command::AnalyzeReset:
        return "analyze-reset";
    case Command::BetaSweep:
        return "beta-sweep";
    case Command::Simulate:
        return "simulate";
    }
    return "";
}

CommandResult run_command(Command command, const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const bool matches = (command == Command::AnalyzeSwitching && config.kind == "switching-analysis") ||
                         (command == Command::AnalyzeReset && config.kind == "reset-analysis") ||
                         (command == Command::BetaSweep && config.kind == "beta-sweep") ||
                         (command == Command::Simulate &&
                          (config.kind == "simulate-switched" || config.kind == "simulate-reset"));
    if (!matches) {
        fail(ErrorKind::Schema, std::string("/kind: command ") + command_name(command) + " expects " +
                                    expected_kind(command) + ", config has " + config.kind);
    }

    const std::filesystem::path out = config.out_dir;
    std::filesystem::create_directories(out);

    CommandResult res;
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, SwitchingAnalysisConfig>) {
                analyze_switching(body, out, res);
            } else if constexpr (std::is_same_v<T, ResetAnalysisConfig>) {
                analyze_reset(body, out, res);
            } else if constexpr (std::is_same_v<T, BetaSweepConfig>) {
                beta_sweep(body, out, res);
            } else if constexpr (std::is_same_v<T, SimulateSwitchedConfig>) {
                simulate_switched_cmd(body, out, res);
            } else {
                simulate_reset_cmd(body, out, res);
            }
        },
        config.body);

    res.files.push_back("report.json");
    res.report["tool"] = "fohs";
    res.report["version"] = FOHS_VERSION;
    res.report["command"] = command_name(command);
    res.report["kind"] = config.kind;
    res.report["name"] = config.name;
    res.report["verdict"] = res.verdict;
    res.report["exit_code"] = res.exit_code;
    res.report["files"] = res.files;
    res.report["config"] = config.effective;
    res.report["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream(out / "report.json") << res.report.dump(2) << '\n';
    return res;
}

} // namespace fohs
