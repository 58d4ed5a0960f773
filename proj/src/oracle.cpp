#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "ceh/errors.hpp"
#include "ceh/lp_dense.hpp"
#include "ceh/solve.hpp"

namespace ceh {

namespace {

constexpr double kIntegralityTol = 1e-9;
constexpr double kPruneTol = 1e-10;

/// A set of binary columns of which exactly one is 1.
using ChooseOne = std::vector<int>;

struct Block {
    std::vector<int> columns;
    std::vector<int> rows;
    std::vector<ChooseOne> groups;
    std::vector<int> free_integers;  // integer columns outside any group
    std::vector<int> integers;       // all integer columns of the block
};

struct Decomposition {
    std::vector<int> design;       // integer columns shared by all blocks
    std::vector<int> design_rows;  // rows over design columns only
    std::vector<Block> blocks;
    bool monolithic = false;
};

int domain_lo(const VariableRef& v) { return static_cast<int>(std::ceil(v.lower - kIntegralityTol)); }
int domain_hi(const VariableRef& v) { return static_cast<int>(std::floor(v.upper + kIntegralityTol)); }

double domain_size(const VariableRef& v) {
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) return std::numeric_limits<double>::infinity();
    return std::max(0, domain_hi(v) - domain_lo(v) + 1);
}

bool is_binary(const VariableRef& v) { return v.integral() && v.lower >= 0.0 && v.upper <= 1.0; }

void find_groups(const MilpProblem& problem, Block& block) {
    std::vector<bool> grouped(static_cast<std::size_t>(problem.column_count()), false);
    std::vector<bool> local(static_cast<std::size_t>(problem.column_count()), false);
    for (int c : block.columns) local[static_cast<std::size_t>(c)] = true;
    for (int r : block.rows) {
        const auto& row = problem.rows()[static_cast<std::size_t>(r)];
        if (row.relation != Relation::Equal || row.rhs != 1.0 || row.terms.empty()) continue;
        const bool eligible = std::all_of(row.terms.begin(), row.terms.end(), [&](const Term& t) {
            const auto c = static_cast<std::size_t>(t.column);
            return t.coef == 1.0 && local[c] && !grouped[c] && is_binary(problem.columns()[c]);
        });
        if (!eligible) continue;
        ChooseOne group;
        for (const auto& t : row.terms) {
            group.push_back(t.column);
            grouped[static_cast<std::size_t>(t.column)] = true;
        }
        block.groups.push_back(std::move(group));
    }
    for (int c : block.columns) {
        if (!problem.columns()[static_cast<std::size_t>(c)].integral()) continue;
        block.integers.push_back(c);
        if (!grouped[static_cast<std::size_t>(c)]) block.free_integers.push_back(c);
    }
}

/// Splits the problem into design columns (scenario-free integers) and one
/// block per scenario index. Falls back to a single block when a row couples
/// two scenarios or a scenario-free column is continuous.
Decomposition decompose(const MilpProblem& problem) {
    const auto& cols = problem.columns();
    Decomposition d;
    std::map<int, int> block_of_scenario;
    bool ok = true;
    for (int j = 0; j < problem.column_count(); ++j) {
        const auto& v = cols[static_cast<std::size_t>(j)];
        if (v.key.idx.s < 0) {
            if (!v.integral()) ok = false;
            d.design.push_back(j);
        } else if (!block_of_scenario.contains(v.key.idx.s)) {
            block_of_scenario.emplace(v.key.idx.s, static_cast<int>(block_of_scenario.size()));
        }
    }
    d.blocks.resize(block_of_scenario.size());
    for (int j = 0; j < problem.column_count() && ok; ++j) {
        const int s = cols[static_cast<std::size_t>(j)].key.idx.s;
        if (s >= 0) d.blocks[static_cast<std::size_t>(block_of_scenario.at(s))].columns.push_back(j);
    }
    for (int r = 0; r < problem.row_count() && ok; ++r) {
        int block = -1;
        for (const auto& t : problem.rows()[static_cast<std::size_t>(r)].terms) {
            const int s = cols[static_cast<std::size_t>(t.column)].key.idx.s;
            if (s < 0) continue;
            const int b = block_of_scenario.at(s);
            if (block >= 0 && block != b) ok = false;
            block = b;
        }
        if (block < 0) {
            d.design_rows.push_back(r);
        } else {
            d.blocks[static_cast<std::size_t>(block)].rows.push_back(r);
        }
    }
    if (!ok) {
        d = Decomposition{};
        d.monolithic = true;
        Block all;
        all.columns.resize(static_cast<std::size_t>(problem.column_count()));
        std::iota(all.columns.begin(), all.columns.end(), 0);
        all.rows.resize(static_cast<std::size_t>(problem.row_count()));
        std::iota(all.rows.begin(), all.rows.end(), 0);
        d.blocks.push_back(std::move(all));
    }
    for (auto& block : d.blocks) find_groups(problem, block);
    return d;
}

double block_combinations(const MilpProblem& problem, const Block& block) {
    double n = 1.0;
    for (const auto& g : block.groups) n *= static_cast<double>(g.size());
    for (int c : block.free_integers) n *= domain_size(problem.columns()[static_cast<std::size_t>(c)]);
    return n;
}

double count_combinations(const MilpProblem& problem, const Decomposition& d) {
    double designs = 1.0;
    for (int c : d.design) designs *= domain_size(problem.columns()[static_cast<std::size_t>(c)]);
    double per_design = d.blocks.empty() ? 1.0 : 0.0;
    for (const auto& block : d.blocks) per_design += block_combinations(problem, block);
    return designs * per_design;
}

void check_caps(const MilpProblem& problem, const Decomposition& d, const EnumerationCaps& caps) {
    const double combos = count_combinations(problem, d);
    for (const auto& v : problem.columns()) {
        if (!v.integral() || is_binary(v)) continue;
        if (domain_size(v) > caps.max_integer_domain) {
            throw EnumerationTooLarge(fmt::format("EnumerationTooLarge: column {} has {} values (cap {}); {:.6g} combinations",
                                                  v.name(), domain_size(v), caps.max_integer_domain, combos),
                                      combos);
        }
    }
    if (combos > caps.max_combinations) {
        throw EnumerationTooLarge(
            fmt::format("EnumerationTooLarge: {:.6g} combinations exceed the cap of {:.6g}", combos, caps.max_combinations),
            combos);
    }
}

class Search {
public:
    Search(const MilpProblem& problem, const Decomposition& d)
        : problem_(problem), d_(d), lower_(static_cast<std::size_t>(problem.column_count())),
          upper_(static_cast<std::size_t>(problem.column_count())) {
        for (int j = 0; j < problem.column_count(); ++j) {
            lower_[static_cast<std::size_t>(j)] = problem.columns()[static_cast<std::size_t>(j)].lower;
            upper_[static_cast<std::size_t>(j)] = problem.columns()[static_cast<std::size_t>(j)].upper;
        }
        // rows over design columns become checkable once their last column is set
        std::vector<int> position(static_cast<std::size_t>(problem.column_count()), -1);
        for (std::size_t i = 0; i < d.design.size(); ++i) position[static_cast<std::size_t>(d.design[i])] = static_cast<int>(i);
        design_checks_.resize(d.design.size());
        for (int r : d.design_rows) {
            int last = -1;
            for (const auto& t : problem.rows()[static_cast<std::size_t>(r)].terms) last = std::max(last, position[static_cast<std::size_t>(t.column)]);
            if (last < 0) {
                empty_design_rows_.push_back(r);
            } else {
                design_checks_[static_cast<std::size_t>(last)].push_back(r);
            }
        }
    }

    void run() {
        for (int r : empty_design_rows_) {
            if (!row_satisfied(r)) return;
        }
        design_dfs(0);
    }

    bool found() const { return std::isfinite(best_); }
    bool unbounded() const { return unbounded_; }
    const std::vector<double>& best_values() const { return best_values_; }
    long long lp_solves() const { return lp_solves_; }
    long long designs() const { return designs_; }

private:
    bool row_satisfied(int r) const {
        const auto& row = problem_.rows()[static_cast<std::size_t>(r)];
        double act = 0.0;
        for (const auto& t : row.terms) act += t.coef * lower_[static_cast<std::size_t>(t.column)];
        const double tol = 1e-9 * std::max(1.0, std::abs(row.rhs));
        switch (row.relation) {
            case Relation::LessEqual: return act <= row.rhs + tol;
            case Relation::GreaterEqual: return act >= row.rhs - tol;
            case Relation::Equal: return std::abs(act - row.rhs) <= tol;
        }
        return false;
    }

    void fix(int c, double v) {
        lower_[static_cast<std::size_t>(c)] = v;
        upper_[static_cast<std::size_t>(c)] = v;
    }

    void release(int c) {
        lower_[static_cast<std::size_t>(c)] = problem_.columns()[static_cast<std::size_t>(c)].lower;
        upper_[static_cast<std::size_t>(c)] = problem_.columns()[static_cast<std::size_t>(c)].upper;
    }

    void design_dfs(std::size_t depth) {
        if (unbounded_) return;
        if (depth == d_.design.size()) {
            evaluate_design();
            return;
        }
        const int c = d_.design[depth];
        const auto& v = problem_.columns()[static_cast<std::size_t>(c)];
        for (int value = domain_lo(v); value <= domain_hi(v); ++value) {
            fix(c, value);
            bool ok = true;
            for (int r : design_checks_[depth]) ok = ok && row_satisfied(r);
            if (ok) design_dfs(depth + 1);
        }
        release(c);
    }

    lp::LpResult solve_lp(const Block& block) {
        ++lp_solves_;
        lp::LpView view{&problem_, &block.rows, &block.columns, &lower_, &upper_};
        auto r = lp::solve_dense(view);
        if (r.status == lp::LpStatus::Unbounded) unbounded_ = true;
        return r;
    }

    void evaluate_design() {
        ++designs_;
        long double design_cost = problem_.objective_constant();
        for (int c : d_.design) design_cost += static_cast<long double>(problem_.objective()[static_cast<std::size_t>(c)]) * lower_[static_cast<std::size_t>(c)];

        const std::size_t nb = d_.blocks.size();
        std::vector<long double> bound(nb);
        long double total = design_cost;
        for (std::size_t b = 0; b < nb; ++b) {
            auto root = solve_lp(d_.blocks[b]);
            if (root.status != lp::LpStatus::Optimal) return;
            bound[b] = root.objective;
            total += root.objective;
        }
        if (!improves(total)) return;

        std::vector<double> values(static_cast<std::size_t>(problem_.column_count()), 0.0);
        for (int c : d_.design) values[static_cast<std::size_t>(c)] = lower_[static_cast<std::size_t>(c)];
        for (std::size_t b = 0; b < nb; ++b) {
            const long double others = total - bound[b];
            block_best_ = std::numeric_limits<long double>::infinity();
            block_cutoff_ = std::isfinite(best_) ? best_ - others : std::numeric_limits<long double>::infinity();
            block_values_.clear();
            block_dfs(d_.blocks[b], 0);
            if (unbounded_ || !std::isfinite(block_best_)) return;
            total = others + block_best_;
            bound[b] = block_best_;
            for (int c : d_.blocks[b].columns) values[static_cast<std::size_t>(c)] = block_values_[static_cast<std::size_t>(c)];
        }
        if (!improves(total)) return;
        best_ = total;
        best_values_ = std::move(values);
    }

    bool improves(long double value) const {
        if (!std::isfinite(best_)) return true;
        return value < best_ - kPruneTol * std::max<long double>(1.0L, std::fabs(best_));
    }

    bool below_cutoff(long double value) const {
        if (!std::isfinite(block_cutoff_)) return true;
        return value < block_cutoff_ - kPruneTol * std::max<long double>(1.0L, std::fabs(block_cutoff_));
    }

    bool integral(const Block& block, const std::vector<double>& x) const {
        return std::all_of(block.integers.begin(), block.integers.end(), [&](int c) {
            const double v = x[static_cast<std::size_t>(c)];
            return std::abs(v - std::round(v)) <= kIntegralityTol;
        });
    }

    void block_dfs(const Block& block, std::size_t depth) {
        if (unbounded_) return;
        auto lp = solve_lp(block);
        if (lp.status != lp::LpStatus::Optimal) return;
        if (!below_cutoff(lp.objective)) return;
        if (integral(block, lp.values)) {
            block_best_ = lp.objective;
            block_cutoff_ = lp.objective;
            block_values_ = std::move(lp.values);
            for (int c : block.integers) block_values_[static_cast<std::size_t>(c)] = std::round(block_values_[static_cast<std::size_t>(c)]);
            return;
        }
        const std::size_t groups = block.groups.size();
        if (depth < groups) {
            const auto& group = block.groups[depth];
            std::vector<int> order(group.begin(), group.end());
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return lp.values[static_cast<std::size_t>(a)] > lp.values[static_cast<std::size_t>(b)];
            });
            for (int chosen : order) {
                for (int c : group) fix(c, c == chosen ? 1.0 : 0.0);
                block_dfs(block, depth + 1);
            }
            for (int c : group) release(c);
            return;
        }
        const std::size_t k = depth - groups;
        if (k >= block.free_integers.size()) return;  // all fixed yet fractional: cannot happen
        const int c = block.free_integers[k];
        const auto& v = problem_.columns()[static_cast<std::size_t>(c)];
        std::vector<int> order;
        for (int value = domain_lo(v); value <= domain_hi(v); ++value) order.push_back(value);
        const double target = lp.values[static_cast<std::size_t>(c)];
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(a - target) < std::abs(b - target); });
        for (int value : order) {
            fix(c, value);
            block_dfs(block, depth + 1);
        }
        release(c);
    }

    const MilpProblem& problem_;
    const Decomposition& d_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<std::vector<int>> design_checks_;
    std::vector<int> empty_design_rows_;

    long double best_ = std::numeric_limits<long double>::infinity();
    std::vector<double> best_values_;
    long double block_best_ = 0.0L;
    long double block_cutoff_ = 0.0L;
    std::vector<double> block_values_;
    bool unbounded_ = false;
    long long lp_solves_ = 0;
    long long designs_ = 0;
};

}  // namespace

double enumeration_size(const MilpProblem& problem, const EnumerationCaps& caps) {
    (void)caps;
    return count_combinations(problem, decompose(problem));
}

SolveOutcome oracle_solve(const MilpProblem& problem, const EnumerationCaps& caps) {
    const auto started = std::chrono::steady_clock::now();
    problem.check_structure();
    const auto d = decompose(problem);
    check_caps(problem, d, caps);

    Search search(problem, d);
    search.run();

    SolveOutcome out;
    out.backend = "enumeration";
    out.diagnostics.push_back(fmt::format("combinations {:.6g}", count_combinations(problem, d)));
    out.diagnostics.push_back(fmt::format("designs evaluated {}", search.designs()));
    out.diagnostics.push_back(fmt::format("lp solves {}", search.lp_solves()));
    if (d.monolithic) out.diagnostics.emplace_back("no scenario decomposition");
    if (search.unbounded()) {
        out.status = SolveStatus::Unbounded;
    } else if (search.found()) {
        out.status = SolveStatus::Optimal;
        out.has_solution = true;
        out.values = search.best_values();
        out.objective = problem.evaluate_objective(out.values);
        out.bound = out.objective;
        out.gap = 0.0;
    } else {
        out.status = SolveStatus::Infeasible;
    }
    out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

}  // namespace ceh
