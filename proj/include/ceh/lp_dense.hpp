#pragma once

#include <vector>

#include "ceh/milp.hpp"

namespace ceh::lp {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;  // one per column of the problem
    long double objective = 0.0L;
    int iterations = 0;
};

/// Linear program over a subset of a MILP's rows with per-column bounds that
/// override the problem's own. Integrality is ignored. Columns outside
/// `columns` must be fixed (lower == upper); they enter as constants.
struct LpView {
    const MilpProblem* problem = nullptr;
    const std::vector<int>* rows = nullptr;
    const std::vector<int>* columns = nullptr;
    const std::vector<double>* lower = nullptr;
    const std::vector<double>* upper = nullptr;
};

/// Minimizes the objective restricted to `view.columns` with a two-phase
/// bounded-variable simplex on a dense tableau in long double, Bland's rule
/// throughout. Singleton and redundant rows are folded into bounds first.
/// `values` is filled for the view's columns and the fixed ones it touches.
LpResult solve_dense(const LpView& view);

}  // namespace ceh::lp
