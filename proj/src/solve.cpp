#include "ceh/solve.hpp"

#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "ceh/errors.hpp"

namespace ceh {

std::unique_ptr<SolverBackend> make_highs_backend();

namespace {

class EnumerationBackend final : public SolverBackend {
public:
    std::string_view id() const override { return "enumeration"; }
    SolveOutcome solve(const MilpProblem& problem, const SolveOptions&) const override { return oracle_solve(problem); }
};

}  // namespace

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Feasible: return "Feasible";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::Unbounded: return "Unbounded";
        case SolveStatus::TimeLimit: return "TimeLimit";
    }
    return "?";
}

void SolveOptions::validate() const {
    if (!(relative_gap >= 0.0)) throw ConfigError(fmt::format("ConfigError: relative gap must be >= 0, got {}", relative_gap));
    if (!(time_limit_s > 0.0)) throw ConfigError(fmt::format("ConfigError: time limit must be > 0 s, got {}", time_limit_s));
    if (threads < 1) throw ConfigError(fmt::format("ConfigError: thread count must be >= 1, got {}", threads));
}

std::vector<std::string> backend_ids() { return {"highs", "enumeration"}; }

std::unique_ptr<SolverBackend> make_backend(std::string_view id) {
    if (id == "highs") return make_highs_backend();
    if (id == "enumeration") return std::make_unique<EnumerationBackend>();
    throw BackendUnavailable(fmt::format("BackendUnavailable: no solver backend '{}' (available: highs, enumeration)", id));
}

std::string default_backend_id() {
    if (const char* env = std::getenv("CEHSIZE_BACKEND"); env != nullptr && *env != '\0') return env;
    return "highs";
}

SolveOutcome solve(const MilpProblem& problem, const SolveOptions& options) {
    options.validate();
    problem.check_structure();
    const auto backend = make_backend(options.backend_id.empty() ? default_backend_id() : options.backend_id);
    auto out = backend->solve(problem, options);
    if (out.has_solution) {
        for (std::size_t j = 0; j < out.values.size(); ++j) {
            if (problem.columns()[j].integral()) out.values[j] = std::round(out.values[j]);
        }
    }
    return out;
}

int exit_code(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return 0;
        case SolveStatus::Feasible: return 10;
        case SolveStatus::Infeasible: return 20;
        case SolveStatus::Unbounded: return 25;
        case SolveStatus::TimeLimit: return 30;
    }
    return 1;
}

}  // namespace ceh
