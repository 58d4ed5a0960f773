#include "ceh/run.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "ceh/catalog.hpp"
#include "ceh/errors.hpp"
#include "ceh/ingest.hpp"
#include "ceh/io.hpp"
#include "ceh/model.hpp"
#include "ceh/report.hpp"

namespace ceh::run {

namespace {

namespace fs = std::filesystem;

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ModelInputs load_checked(const RunOptions& options, std::ostream& out) {
    auto inputs = ingest::load_inputs(options.config);
    for (const auto& w : inputs.warnings) fmt::print(out, "warning: {}\n", w);
    for (const auto& scenario : inputs.scenarios.scenarios) {
        for (const auto& session : scenario.sessions) {
            try {
                catalog::check_session_feasibility(session, inputs.catalog.chargers, scenario.delta_t_hours);
            } catch (const InfeasibleSession& e) {
                throw InfeasibleSession(fmt::format("{} in scenario '{}'", e.what(), scenario.id));
            }
        }
    }
    return inputs;
}

void export_model(const MilpProblem& problem, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec) throw IoError(fmt::format("IoError: cannot create '{}': {}", directory.string(), ec.message()));
    std::ostringstream mps;
    write_mps(problem, mps, "cehsize");
    write_text_atomically(directory / "model.mps", mps.str());
    std::ostringstream dump;
    write_constraint_dump(problem, dump);
    write_text_atomically(directory / "constraints.txt", dump.str());
}

/// Runs `body` and turns every failure into an exit code and a manifest.
int guarded(const char* command, const RunOptions& options, std::ostream& err,
            const std::function<int(RunManifest&)>& body) {
    RunManifest manifest;
    manifest.command = command;
    manifest.config = options.config.string();
    manifest.output_directory = options.out.string();
    manifest.backend = options.solve.backend_id.empty() ? default_backend_id() : options.solve.backend_id;
    manifest.relative_gap = options.solve.relative_gap;
    manifest.time_limit_s = options.solve.time_limit_s;
    manifest.seed = options.solve.seed;
    manifest.threads = options.solve.threads;
    manifest.export_model = options.export_model;
    manifest.started_utc = utc_now();
    manifest.solver_version = "HiGHS " + highs_version();
    int code = exit_codes::kOtherError;
    try {
        code = body(manifest);
    } catch (const std::exception& e) {
        code = exit_code_for(e);
        manifest.error = e.what();
        fmt::print(err, "error: {}\n", e.what());
    }
    manifest.exit_code = code;
    manifest.finished_utc = utc_now();
    if (!options.out.empty()) {
        try {
            std::error_code ec;
            fs::create_directories(options.out, ec);
            write_manifest(manifest, options.out);
        } catch (const std::exception& e) {
            fmt::print(err, "error: {}\n", e.what());
        }
    }
    return code;
}

}  // namespace

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const InfeasibleSession*>(&error)) return exit_codes::kInfeasibleSession;
    if (dynamic_cast<const MissingFile*>(&error) || dynamic_cast<const SchemaViolation*>(&error) ||
        dynamic_cast<const InvariantViolation*>(&error) || dynamic_cast<const SessionWindowError*>(&error) ||
        dynamic_cast<const CalendarMismatch*>(&error) || dynamic_cast<const ConfigError*>(&error)) {
        return exit_codes::kInputError;
    }
    if (dynamic_cast<const InfeasibleInstance*>(&error)) return exit_code(SolveStatus::Infeasible);
    if (dynamic_cast<const EnumerationTooLarge*>(&error)) return exit_codes::kEnumerationTooLarge;
    if (dynamic_cast<const ValidationFailure*>(&error)) return exit_codes::kValidationFailure;
    if (dynamic_cast<const BackendUnavailable*>(&error)) return exit_codes::kBackendUnavailable;
    return exit_codes::kOtherError;
}

void write_manifest(const RunManifest& m, const fs::path& directory) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["config"] = m.config;
    j["output_directory"] = m.output_directory;
    j["options"] = {{"backend", m.backend}, {"gap", m.relative_gap}, {"time_limit_s", m.time_limit_s},
                    {"seed", m.seed}, {"threads", m.threads}, {"export_model", m.export_model}};
    j["started_utc"] = m.started_utc;
    j["finished_utc"] = m.finished_utc;
    j["versions"] = {{"cehsize", m.tool_version}, {"solver", m.solver_version}};
    j["status"] = m.status;
    j["objective"] = m.objective ? nlohmann::ordered_json(*m.objective) : nlohmann::ordered_json(nullptr);
    j["exit_code"] = m.exit_code;
    if (!m.error.empty()) j["error"] = m.error;
    write_text_atomically(directory / "run_manifest.json", j.dump(2) + "\n");
}

int cmd_validate(const RunOptions& options, std::ostream& out, std::ostream& err) {
    return guarded("validate", options, err, [&](RunManifest& manifest) {
        const auto inputs = load_checked(options, out);
        fmt::print(out, "ok: {} scenarios, {} slots, {} sessions, {} candidate chargers\n", inputs.scenarios.scenarios.size(),
                   inputs.scenarios.slot_count(), inputs.scenarios.session_count(), inputs.catalog.candidate_count());
        manifest.status = "Valid";
        return exit_codes::kOk;
    });
}

int cmd_export(const RunOptions& options, std::ostream& out, std::ostream& err) {
    return guarded("export", options, err, [&](RunManifest& manifest) {
        if (options.out.empty()) throw ConfigError("ConfigError: export needs an output directory (--out)");
        const auto inputs = load_checked(options, out);
        const auto built = model::build_problem(inputs);
        export_model(built.problem, options.out);
        fmt::print(out, "exported {} columns ({} integer), {} rows, {} nonzeros\n", built.problem.column_count(),
                   built.problem.integer_column_count(), built.problem.row_count(), built.problem.nonzero_count());
        manifest.status = "Exported";
        return exit_codes::kOk;
    });
}

int cmd_size(const RunOptions& options, std::ostream& out, std::ostream& err) {
    return guarded("size", options, err, [&](RunManifest& manifest) {
        const auto inputs = load_checked(options, out);
        const auto built = model::build_problem(inputs);
        fmt::print(out, "model: {} columns ({} integer), {} rows\n", built.problem.column_count(),
                   built.problem.integer_column_count(), built.problem.row_count());
        if (options.export_model && !options.out.empty()) export_model(built.problem, options.out);

        const auto outcome = solve(built.problem, options.solve);
        manifest.status = std::string(to_string(outcome.status));
        fmt::print(out, "status: {} ({:.3f} s, backend {})\n", to_string(outcome.status), outcome.wall_time_s, outcome.backend);
        if (!outcome.has_solution) return exit_code(outcome.status);

        manifest.objective = outcome.objective;
        const auto solution = extract_solution(outcome, built.maps, inputs);
        if (outcome.status == SolveStatus::Optimal) {
            const double deviation = price_relaxation_deviation(solution, inputs);
            if (deviation > 1e-6) {
                throw ValidationFailure(fmt::format("ValidationFailure: price_relaxation not tight at the optimum (deviation {:.3g})", deviation));
            }
        }
        const auto balance = compute_energy_balance(solution, inputs);
        fmt::print(out, "objective: {:.2f} EUR/year (bound {:.2f}, gap {:.3g})\n", outcome.objective, outcome.bound, outcome.gap);
        const auto& d = solution.design;
        for (std::size_t p = 0; p < d.pv_units.size(); ++p) fmt::print(out, "pv {}: {}\n", inputs.catalog.pv[p].id, d.pv_units[p]);
        for (std::size_t w = 0; w < d.wt_units.size(); ++w) fmt::print(out, "wt {}: {}\n", inputs.catalog.wt[w].id, d.wt_units[w]);
        for (std::size_t b = 0; b < d.bess_units.size(); ++b) fmt::print(out, "bess {}: {}\n", inputs.catalog.bess[b].id, d.bess_units[b]);
        fmt::print(out, "chargers: [{}]\n", fmt::join(d.chargers, ","));
        if (!options.out.empty()) render_reports(solution, balance, inputs, options.out);
        return exit_code(outcome.status);
    });
}

int cmd_crosscheck(const RunOptions& options, std::ostream& out, std::ostream& err) {
    return guarded("crosscheck", options, err, [&](RunManifest& manifest) {
        const auto inputs = load_checked(options, out);
        const auto built = model::build_problem(inputs);
        const auto oracle = oracle_solve(built.problem, options.caps);
        const auto backend = solve(built.problem, options.solve);
        fmt::print(out, "{}: {} objective {}\n", backend.backend, to_string(backend.status), backend.objective);
        fmt::print(out, "enumeration: {} objective {}\n", to_string(oracle.status), oracle.objective);
        manifest.status = std::string(to_string(backend.status));
        if (backend.has_solution) manifest.objective = backend.objective;
        if (oracle.status != backend.status) {
            fmt::print(out, "mismatch: statuses differ\n");
            return exit_codes::kCrosscheckMismatch;
        }
        if (oracle.status != SolveStatus::Optimal) return exit_codes::kOk;
        const double gap = std::abs(backend.objective - oracle.objective) / std::max(1.0, std::abs(oracle.objective));
        fmt::print(out, "relative gap: {:.3g}\n", gap);
        return gap <= 1e-6 ? exit_codes::kOk : exit_codes::kCrosscheckMismatch;
    });
}

}  // namespace ceh::run
