#include <cmath>
#include <numeric>

#include <Highs.h>
#include <doctest.h>

#include "ceh/lp_dense.hpp"
#include "instances.hpp"

using namespace ceh;
using doctest::Approx;

namespace {

int column(MilpProblem& p, double lo, double hi, double cost) {
    VariableRef v;
    v.key.kind = VarKind::GridPower;
    v.key.idx.t = p.column_count();
    v.lower = lo;
    v.upper = hi;
    const int j = p.add_column(v);
    p.add_cost(j, cost);
    return j;
}

struct Solved {
    lp::LpResult result;
    double objective = 0.0;
};

Solved run(const MilpProblem& p, std::vector<int> columns = {}) {
    std::vector<int> rows(static_cast<std::size_t>(p.row_count()));
    std::iota(rows.begin(), rows.end(), 0);
    if (columns.empty()) {
        columns.resize(static_cast<std::size_t>(p.column_count()));
        std::iota(columns.begin(), columns.end(), 0);
    }
    std::vector<double> lower;
    std::vector<double> upper;
    for (const auto& c : p.columns()) {
        lower.push_back(c.lower);
        upper.push_back(c.upper);
    }
    lp::LpView view{&p, &rows, &columns, &lower, &upper};
    Solved out{lp::solve_dense(view), 0.0};
    if (out.result.status == lp::LpStatus::Optimal) {
        for (int j : columns) out.objective += p.objective()[static_cast<std::size_t>(j)] * out.result.values[static_cast<std::size_t>(j)];
    }
    return out;
}

}  // namespace

TEST_SUITE("lp_dense") {

TEST_CASE("two-variable vertex") {
    MilpProblem p;
    const int x = column(p, 0, kInf, -1);
    const int y = column(p, 0, kInf, -1);
    p.add_row({{x, 1}, {y, 2}}, Relation::LessEqual, 4, ConstraintFamily::PowerBalance);
    p.add_row({{x, 3}, {y, 1}}, Relation::LessEqual, 6, ConstraintFamily::PowerBalance);
    const auto s = run(p);
    REQUIRE(s.result.status == lp::LpStatus::Optimal);
    CHECK(s.result.values[0] == Approx(1.6).epsilon(1e-12));
    CHECK(s.result.values[1] == Approx(1.2).epsilon(1e-12));
    CHECK(s.objective == Approx(-2.8).epsilon(1e-12));
    CHECK(static_cast<double>(s.result.objective) == Approx(-2.8).epsilon(1e-12));
}

TEST_CASE("infeasible rows") {
    MilpProblem p;
    const int x = column(p, 0, 1, 1);
    const int y = column(p, 0, 1, 1);
    p.add_row({{x, 1}, {y, 1}}, Relation::GreaterEqual, 5, ConstraintFamily::PowerBalance);
    CHECK(run(p).result.status == lp::LpStatus::Infeasible);

    MilpProblem q;
    const int a = column(q, 0, kInf, 0);
    const int b = column(q, 0, kInf, 0);
    q.add_row({{a, 1}, {b, 1}}, Relation::LessEqual, 1, ConstraintFamily::PowerBalance);
    q.add_row({{a, 1}, {b, 1}}, Relation::GreaterEqual, 2, ConstraintFamily::PowerBalance);
    CHECK(run(q).result.status == lp::LpStatus::Infeasible);
}

TEST_CASE("unbounded ray") {
    MilpProblem p;
    const int x = column(p, 0, kInf, -1);
    const int y = column(p, 0, kInf, 0);
    p.add_row({{x, 1}, {y, -1}}, Relation::LessEqual, 1, ConstraintFamily::PowerBalance);
    CHECK(run(p).result.status == lp::LpStatus::Unbounded);
}

TEST_CASE("free and negative-bounded columns") {
    MilpProblem p;
    const int x = column(p, -kInf, kInf, 1);
    const int y = column(p, -2, 2, 0);
    p.add_row({{x, 1}, {y, 1}}, Relation::GreaterEqual, -3, ConstraintFamily::PowerBalance);
    const auto s = run(p);
    REQUIRE(s.result.status == lp::LpStatus::Optimal);
    CHECK(s.objective == Approx(-5.0).epsilon(1e-12));
    CHECK(s.result.values[1] == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("equality rows and singleton rows") {
    MilpProblem p;
    const int x = column(p, 0, 10, 2);
    const int y = column(p, 0, 10, 3);
    const int z = column(p, 0, 10, -1);
    p.add_row({{x, 1}, {y, 1}, {z, 1}}, Relation::Equal, 6, ConstraintFamily::PowerBalance);
    p.add_row({{z, 2}}, Relation::LessEqual, 8, ConstraintFamily::PowerBalance);
    p.add_row({{y, 1}}, Relation::GreaterEqual, 1, ConstraintFamily::PowerBalance);
    const auto s = run(p);
    REQUIRE(s.result.status == lp::LpStatus::Optimal);
    // z = 4, y = 1, x = 1
    CHECK(s.objective == Approx(2.0 + 3.0 - 4.0).epsilon(1e-12));
    CHECK(p.max_violation(s.result.values) <= 1e-12);
}

TEST_CASE("columns outside the view enter as constants") {
    MilpProblem p;
    const int x = column(p, 0, kInf, 1);
    const int z = column(p, 2, 2, 0);
    p.add_row({{x, 1}, {z, 1}}, Relation::GreaterEqual, 5, ConstraintFamily::PowerBalance);
    const auto s = run(p, {x});
    REQUIRE(s.result.status == lp::LpStatus::Optimal);
    CHECK(s.result.values[static_cast<std::size_t>(x)] == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("random bounded LPs agree with HiGHS") {
    cehtest::Rng rng(2024);
    int optimal = 0;
    int infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = rng.integer(1, 7);
        const int m = rng.integer(1, 7);
        MilpProblem p;
        Highs highs;
        highs.setOptionValue("output_flag", false);
        highs.setOptionValue("presolve", "off");
        for (int j = 0; j < n; ++j) {
            const double lo = rng.chance(0.3) ? rng.rounded(-5, 0, 0.5) : 0.0;
            const double hi = lo + rng.rounded(0, 6, 0.5);
            const double cost = rng.rounded(-3, 3, 0.25);
            column(p, lo, hi, cost);
            highs.addVar(lo, hi);
            highs.changeColCost(j, cost);
        }
        for (int i = 0; i < m; ++i) {
            std::vector<Term> terms;
            std::vector<HighsInt> idx;
            std::vector<double> val;
            for (int j = 0; j < n; ++j) {
                if (!rng.chance(0.6)) continue;
                const double a = rng.rounded(-4, 4, 0.5);
                if (a == 0.0) continue;
                terms.push_back({j, a});
                idx.push_back(j);
                val.push_back(a);
            }
            const double rhs = rng.rounded(-6, 10, 0.5);
            const int kind = rng.integer(0, 2);
            const auto rel = kind == 0 ? Relation::LessEqual : kind == 1 ? Relation::GreaterEqual : Relation::Equal;
            p.add_row(terms, rel, rhs, ConstraintFamily::PowerBalance);
            highs.addRow(rel == Relation::LessEqual ? -kHighsInf : rhs, rel == Relation::GreaterEqual ? kHighsInf : rhs,
                         static_cast<HighsInt>(idx.size()), idx.data(), val.data());
        }
        const auto s = run(p);
        highs.run();
        const auto status = highs.getModelStatus();
        CAPTURE(trial);
        if (status == HighsModelStatus::kOptimal) {
            ++optimal;
            REQUIRE(s.result.status == lp::LpStatus::Optimal);
            CHECK(s.objective == Approx(highs.getInfo().objective_function_value).epsilon(1e-7));
            CHECK(p.max_violation(s.result.values) <= 1e-9);
        } else {
            ++infeasible;
            CHECK(status == HighsModelStatus::kInfeasible);
            CHECK(s.result.status == lp::LpStatus::Infeasible);
        }
    }
    CHECK(optimal > 50);
    CHECK(infeasible > 20);
}

}  // TEST_SUITE
