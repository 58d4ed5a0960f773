#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ceh/milp.hpp"

namespace ceh {

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, TimeLimit };

std::string_view to_string(SolveStatus status);

struct SolveOptions {
    double relative_gap = 1e-6;
    double time_limit_s = 600.0;
    int threads = 1;
    std::uint32_t seed = 0;
    /// Empty selects default_backend_id().
    std::string backend_id;

    /// Throws ConfigError for a negative gap or a non-positive time limit.
    void validate() const;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Infeasible;
    /// True when `values` holds a primal assignment (always for Optimal and
    /// Feasible, possibly for TimeLimit).
    bool has_solution = false;
    std::vector<double> values;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double bound = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    double wall_time_s = 0.0;
    std::string backend;
    std::vector<std::string> diagnostics;
};

class SolverBackend {
public:
    virtual ~SolverBackend() = default;
    virtual std::string_view id() const = 0;
    virtual SolveOutcome solve(const MilpProblem& problem, const SolveOptions& options) const = 0;
};

/// Registered backend identifiers.
std::vector<std::string> backend_ids();

/// Throws BackendUnavailable for unknown identifiers.
std::unique_ptr<SolverBackend> make_backend(std::string_view id);

/// Version string of the linked HiGHS library.
std::string highs_version();

/// $CEHSIZE_BACKEND when set, "highs" otherwise.
std::string default_backend_id();

/// Solves with the backend named in the options. Integer columns of the
/// returned values are rounded.
SolveOutcome solve(const MilpProblem& problem, const SolveOptions& options = {});

struct EnumerationCaps {
    /// Largest admissible domain size of any integer column.
    int max_integer_domain = 4;
    /// Largest admissible number of leaf assignments, counted per scenario
    /// block: designs x sum over blocks of block assignments.
    double max_combinations = 4194304.0;  // 2^22
};

/// Leaf assignments oracle_solve would enumerate for this problem.
double enumeration_size(const MilpProblem& problem, const EnumerationCaps& caps = {});

/// Exact reference solver. Enumerates every integer assignment, scenario
/// block by scenario block, and solves the continuous remainder with a
/// dense extended-precision simplex. Subtrees are skipped only when their
/// LP relaxation proves they cannot improve the incumbent.
/// Throws EnumerationTooLarge when the caps are exceeded.
SolveOutcome oracle_solve(const MilpProblem& problem, const EnumerationCaps& caps = {});

/// CLI exit code of a solve status.
int exit_code(SolveStatus status);

}  // namespace ceh
