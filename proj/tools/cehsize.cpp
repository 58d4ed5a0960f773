// cehsize: size a charging energy hub from a config file.

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ceh/run.hpp"

namespace {

ceh::EnumerationCaps parse_caps(const std::string& text) {
    ceh::EnumerationCaps caps;
    if (text.empty()) return caps;
    std::istringstream in(text);
    char comma = 0;
    if (!(in >> caps.max_integer_domain >> comma >> caps.max_combinations) || comma != ',' || !in.eof()) {
        throw CLI::ValidationError("--oracle-caps", "expected DOMAIN,COMBINATIONS, e.g. 4,4194304");
    }
    return caps;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Co-design sizing of a charging energy hub (PV, wind, storage, chargers)"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ceh::run::kToolVersion);

    ceh::run::RunOptions options;
    std::string caps_text;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", options.config, "Hub config (JSON)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", options.out, "Output directory");
    };
    auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--backend", options.solve.backend_id, "Solver backend: highs or enumeration (default $CEHSIZE_BACKEND or highs)");
        cmd->add_option("--gap", options.solve.relative_gap, "Relative MIP gap")->check(CLI::NonNegativeNumber);
        cmd->add_option("--time-limit", options.solve.time_limit_s, "Time limit in seconds")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", options.solve.seed, "Solver random seed");
    };

    auto* validate = app.add_subcommand("validate", "Check inputs and session feasibility");
    add_common(validate);

    auto* size = app.add_subcommand("size", "Build, solve and write reports");
    add_common(size);
    add_solver(size);
    size->add_flag("--export-model", options.export_model, "Also write model.mps and constraints.txt");

    auto* crosscheck = app.add_subcommand("crosscheck", "Compare the backend against the enumeration oracle");
    add_common(crosscheck);
    add_solver(crosscheck);
    crosscheck->add_option("--oracle-caps", caps_text, "Oracle caps DOMAIN,COMBINATIONS (default 4,4194304)");

    auto* exporter = app.add_subcommand("export", "Write the MILP as MPS plus a constraint listing");
    add_common(exporter);

    try {
        app.parse(argc, argv);
        options.caps = parse_caps(caps_text);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ceh::run::exit_codes::kInputError;
    }

    if (validate->parsed()) return ceh::run::cmd_validate(options, std::cout, std::cerr);
    if (size->parsed()) return ceh::run::cmd_size(options, std::cout, std::cerr);
    if (crosscheck->parsed()) return ceh::run::cmd_crosscheck(options, std::cout, std::cerr);
    return ceh::run::cmd_export(options, std::cout, std::cerr);
}
