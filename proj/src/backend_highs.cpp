#include <chrono>
#include <cmath>

#include <Highs.h>
#include <fmt/format.h>

#include "ceh/errors.hpp"
#include "ceh/solve.hpp"

namespace ceh {

namespace {

struct CscMatrix {
    std::vector<HighsInt> start;
    std::vector<HighsInt> index;
    std::vector<double> value;
};

CscMatrix to_csc(const MilpProblem& problem) {
    const auto n = static_cast<std::size_t>(problem.column_count());
    std::vector<HighsInt> count(n, 0);
    for (const auto& row : problem.rows()) {
        for (const auto& t : row.terms) ++count[static_cast<std::size_t>(t.column)];
    }
    CscMatrix m;
    m.start.assign(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) m.start[j + 1] = m.start[j] + count[j];
    m.index.resize(static_cast<std::size_t>(m.start[n]));
    m.value.resize(static_cast<std::size_t>(m.start[n]));
    std::vector<HighsInt> fill(m.start.begin(), m.start.end() - 1);
    for (std::size_t i = 0; i < problem.rows().size(); ++i) {
        for (const auto& t : problem.rows()[i].terms) {
            const auto pos = static_cast<std::size_t>(fill[static_cast<std::size_t>(t.column)]++);
            m.index[pos] = static_cast<HighsInt>(i);
            m.value[pos] = t.coef;
        }
    }
    return m;
}

void check(HighsStatus status, const char* what) {
    if (status == HighsStatus::kError) throw NumericalFailure(fmt::format("NumericalFailure: HiGHS rejected {}", what));
}

class HighsBackend final : public SolverBackend {
public:
    std::string_view id() const override { return "highs"; }

    SolveOutcome solve(const MilpProblem& problem, const SolveOptions& options) const override {
        const auto started = std::chrono::steady_clock::now();
        const auto n = static_cast<std::size_t>(problem.column_count());
        const auto m = static_cast<std::size_t>(problem.row_count());

        std::vector<double> lower(n), upper(n);
        std::vector<HighsInt> integrality(n, 0);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& c = problem.columns()[j];
            lower[j] = c.lower;
            upper[j] = c.upper;
            integrality[j] = c.integral() ? 1 : 0;
        }
        std::vector<double> row_lower(m), row_upper(m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& r = problem.rows()[i];
            row_lower[i] = r.relation == Relation::LessEqual ? -kHighsInf : r.rhs;
            row_upper[i] = r.relation == Relation::GreaterEqual ? kHighsInf : r.rhs;
        }
        const auto csc = to_csc(problem);

        Highs highs;
        check(highs.setOptionValue("output_flag", false), "output_flag");
        check(highs.setOptionValue("threads", static_cast<HighsInt>(std::max(1, options.threads))), "threads");
        check(highs.setOptionValue("random_seed", static_cast<HighsInt>(options.seed % 2147483647U)), "random_seed");
        check(highs.setOptionValue("mip_rel_gap", options.relative_gap), "mip_rel_gap");
        check(highs.setOptionValue("time_limit", options.time_limit_s), "time_limit");
        check(highs.passModel(static_cast<HighsInt>(n), static_cast<HighsInt>(m), static_cast<HighsInt>(csc.index.size()),
                              static_cast<HighsInt>(MatrixFormat::kColwise), static_cast<HighsInt>(ObjSense::kMinimize),
                              problem.objective_constant(), problem.objective().data(), lower.data(), upper.data(),
                              row_lower.data(), row_upper.data(), csc.start.data(), csc.index.data(), csc.value.data(),
                              problem.integer_column_count() > 0 ? integrality.data() : nullptr),
              "the model");

        const auto run_status = highs.run();
        const auto model_status = highs.getModelStatus();
        const auto& info = highs.getInfo();

        SolveOutcome out;
        out.backend = "highs";
        out.diagnostics.push_back(fmt::format("model status: {}", highs.modelStatusToString(model_status)));
        out.diagnostics.push_back(fmt::format("nodes: {}", info.mip_node_count));
        const bool has_primal = info.primal_solution_status == kSolutionStatusFeasible;

        switch (model_status) {
            case HighsModelStatus::kOptimal: out.status = SolveStatus::Optimal; break;
            case HighsModelStatus::kModelEmpty: out.status = SolveStatus::Optimal; break;
            case HighsModelStatus::kInfeasible: out.status = SolveStatus::Infeasible; break;
            case HighsModelStatus::kUnbounded: out.status = SolveStatus::Unbounded; break;
            case HighsModelStatus::kUnboundedOrInfeasible:
                // Every model built here has bounded integer columns and a
                // bounded-below objective, so this means infeasible.
                out.status = SolveStatus::Infeasible;
                break;
            case HighsModelStatus::kTimeLimit: out.status = SolveStatus::TimeLimit; break;
            case HighsModelStatus::kIterationLimit:
            case HighsModelStatus::kSolutionLimit:
            case HighsModelStatus::kInterrupt:
            case HighsModelStatus::kObjectiveBound:
            case HighsModelStatus::kObjectiveTarget:
            case HighsModelStatus::kMemoryLimit:
                if (!has_primal) throw NumericalFailure(fmt::format("NumericalFailure: HiGHS stopped ({}) without a solution",
                                                                    highs.modelStatusToString(model_status)));
                out.status = SolveStatus::Feasible;
                break;
            default:
                throw NumericalFailure(fmt::format("NumericalFailure: HiGHS returned {} (run status {})",
                                                   highs.modelStatusToString(model_status), static_cast<int>(run_status)));
        }

        const bool is_mip = problem.integer_column_count() > 0;
        if (model_status == HighsModelStatus::kModelEmpty) {
            out.has_solution = true;
            out.values.assign(n, 0.0);
            out.objective = problem.objective_constant();
            out.bound = out.objective;
        } else if (has_primal && out.status != SolveStatus::Infeasible && out.status != SolveStatus::Unbounded) {
            out.has_solution = true;
            out.values = highs.getSolution().col_value;
            out.bound = is_mip ? info.mip_dual_bound : info.objective_function_value;
            for (std::size_t j = 0; j < n; ++j) {
                if (integrality[j] != 0) out.values[j] = std::round(out.values[j]);
            }
            if (is_mip) polish(highs, integrality, out);
            out.objective = problem.evaluate_objective(out.values);
        }
        if (out.has_solution && std::isfinite(out.bound)) {
            out.gap = std::abs(out.objective - out.bound) / std::max(1.0, std::abs(out.objective));
        }
        if (out.status == SolveStatus::Optimal && out.has_solution) out.bound = std::min(out.bound, out.objective);
        out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return out;
    }

private:
    /// Fixes the integers at their rounded values and re-solves the LP, so the
    /// continuous part is an exact vertex for the chosen integers.
    static void polish(Highs& highs, const std::vector<HighsInt>& integrality, SolveOutcome& out) {
        std::vector<HighsInt> cols;
        std::vector<double> vals;
        for (std::size_t j = 0; j < integrality.size(); ++j) {
            if (integrality[j] == 0) continue;
            cols.push_back(static_cast<HighsInt>(j));
            vals.push_back(out.values[j]);
        }
        std::vector<HighsVarType> continuous(cols.size(), HighsVarType::kContinuous);
        if (highs.changeColsBounds(static_cast<HighsInt>(cols.size()), cols.data(), vals.data(), vals.data()) == HighsStatus::kError) return;
        if (highs.changeColsIntegrality(static_cast<HighsInt>(cols.size()), cols.data(), continuous.data()) == HighsStatus::kError) return;
        highs.setOptionValue("time_limit", kHighsInf);
        highs.run();
        if (highs.getModelStatus() != HighsModelStatus::kOptimal) {
            out.diagnostics.emplace_back("LP polish skipped: fixed-integer LP not optimal");
            return;
        }
        const auto& polished = highs.getSolution().col_value;
        for (std::size_t j = 0; j < integrality.size(); ++j) {
            if (integrality[j] == 0) out.values[j] = polished[j];
        }
        out.diagnostics.emplace_back("LP polish applied");
    }
};

}  // namespace

std::string highs_version() { return highsVersion(); }

std::unique_ptr<SolverBackend> make_highs_backend() { return std::make_unique<HighsBackend>(); }

}  // namespace ceh
