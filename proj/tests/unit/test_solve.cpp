#include <bit>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include <doctest.h>

#include "ceh/errors.hpp"
#include "ceh/model.hpp"
#include "ceh/report.hpp"
#include "ceh/solve.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace ceh;
using doctest::Approx;

namespace {

SolveOutcome with_backend(const MilpProblem& p, const std::string& id) {
    SolveOptions o;
    o.backend_id = id;
    o.relative_gap = 1e-9;
    return solve(p, o);
}

/// No sun, dear storage, two idle chargers.
ModelInputs idle_hub() {
    TechnologyCatalog cat;
    PvTechnology pv;
    pv.id = "pv";
    pv.invest_cost = 500.0;
    pv.max_units = 3;
    cat.pv.push_back(pv);
    auto b = cehtest::case_study_bess();
    b.invest_cost = 1e6;
    b.max_units = 2;
    cat.bess.push_back(b);
    cat.chargers.push_back(cehtest::charger_type("dc", 150.0, 40000.0, 2));
    return cehtest::make_inputs(cat, {cehtest::flat_scenario("day", 365, 4)});
}

}  // namespace

TEST_SUITE("solve") {

TEST_CASE("a hub without demand builds nothing") {
    const auto in = idle_hub();
    const auto built = model::build_problem(in);
    for (const std::string id : {"highs", "enumeration"}) {
        CAPTURE(id);
        const auto out = with_backend(built.problem, id);
        REQUIRE(out.status == SolveStatus::Optimal);
        CHECK(out.objective == Approx(0.0));
        const auto sol = extract_solution(out, built.maps, in);
        CHECK(sol.design.pv_units == std::vector<int>{0});
        CHECK(sol.design.bess_units == std::vector<int>{0});
        CHECK(sol.design.chargers == std::vector<int>{0, 0});
        CHECK(sol.operations[0].sessions.empty());
    }
}

TEST_CASE("both solvers reproduce the frozen tiny optimum") {
    const auto built = model::build_problem(cehtest::tiny_example());
    const auto highs = with_backend(built.problem, "highs");
    const auto oracle = oracle_solve(built.problem);
    REQUIRE(highs.status == SolveStatus::Optimal);
    REQUIRE(oracle.status == SolveStatus::Optimal);
    CHECK(oracle.objective == Approx(cehtest::kTinyOracleObjective).epsilon(1e-9));
    CHECK(highs.objective == Approx(cehtest::kTinyOracleObjective).epsilon(1e-6));
    CHECK(built.problem.max_violation(oracle.values) <= 1e-7);
    CHECK(built.problem.evaluate_objective(oracle.values) == Approx(oracle.objective).epsilon(1e-9));
}

TEST_CASE("the cheaper of two starts is chosen") {
    auto sc = cehtest::flat_scenario("day", 365, 4);
    sc.grid.buy_price = {0.20, 0.40, 0.10, 0.20};
    sc.grid.sell_price = {0.05, 0.05, 0.05, 0.05};
    // 900 kWh at 150 kW fills one 6 h slot, parked in slots 2..3
    sc.sessions.push_back(cehtest::session("ev", 2, 3, 900.0));
    TechnologyCatalog cat;
    cat.chargers.push_back(cehtest::charger_type("dc", 150.0, 40000.0, 1));
    const auto in = cehtest::make_inputs(cat, {sc});
    const auto built = model::build_problem(in);
    const double expected = cehtest::kappa_annuity(0.0275, 10) * 40000.0 + 400.0 + 365 * 6 * 150 * 0.10;
    for (const std::string id : {"highs", "enumeration"}) {
        CAPTURE(id);
        const auto out = with_backend(built.problem, id);
        REQUIRE(out.status == SolveStatus::Optimal);
        CHECK(out.objective == Approx(expected).epsilon(1e-9));
        const auto sol = extract_solution(out, built.maps, in);
        REQUIRE(sol.operations[0].sessions.size() == 1);
        CHECK(sol.operations[0].sessions[0].start_slot == 3);
    }
}

TEST_CASE("enumeration refuses oversized problems") {
    auto sc = cehtest::flat_scenario("day", 365, 4);
    sc.sessions.push_back(cehtest::session("ev", 2, 3, 900.0));
    TechnologyCatalog cat;
    cat.chargers.push_back(cehtest::charger_type("dc", 150.0, 40000.0, 30));
    ModelOptions opts;
    opts.symmetry_breaking = false;
    const auto built = model::build_problem(cehtest::make_inputs(cat, {sc}, opts));
    CHECK(enumeration_size(built.problem) >= std::pow(2.0, 30));
    try {
        oracle_solve(built.problem);
        FAIL("expected EnumerationTooLarge");
    } catch (const EnumerationTooLarge& e) {
        CHECK(e.combinations() >= std::pow(2.0, 30));
    }

    EnumerationCaps narrow;
    narrow.max_integer_domain = 2;
    CHECK_THROWS_AS(oracle_solve(model::build_problem(cehtest::tiny_example()).problem, narrow), EnumerationTooLarge);
}

TEST_CASE("backend registry and options") {
    CHECK(backend_ids() == std::vector<std::string>{"highs", "enumeration"});
    CHECK_THROWS_AS(make_backend("cplex"), BackendUnavailable);
    CHECK(make_backend("highs")->id() == "highs");
    CHECK(make_backend("enumeration")->id() == "enumeration");
    CHECK_FALSE(highs_version().empty());

    SolveOptions o;
    CHECK_NOTHROW(o.validate());
    o.relative_gap = -0.1;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    o = {};
    o.time_limit_s = 0.0;
    CHECK_THROWS_AS(o.validate(), ConfigError);
    o = {};
    o.backend_id = "cplex";
    CHECK_THROWS_AS(solve(MilpProblem{}, o), BackendUnavailable);

    ::setenv("CEHSIZE_BACKEND", "enumeration", 1);
    CHECK(default_backend_id() == "enumeration");
    ::unsetenv("CEHSIZE_BACKEND");
    CHECK(default_backend_id() == "highs");
}

TEST_CASE("exit codes of solve statuses") {
    CHECK(exit_code(SolveStatus::Optimal) == 0);
    CHECK(exit_code(SolveStatus::Feasible) == 10);
    CHECK(exit_code(SolveStatus::Infeasible) == 20);
    CHECK(exit_code(SolveStatus::Unbounded) == 25);
    CHECK(exit_code(SolveStatus::TimeLimit) == 30);
}

TEST_CASE("infeasible grid is reported, not solved") {
    auto sc = cehtest::flat_scenario("day", 365, 4);
    sc.sessions.push_back(cehtest::session("ev", 2, 3, 900.0));
    sc.grid.withdrawal_limit_kw = {100.0, 100.0, 100.0, 100.0};
    TechnologyCatalog cat;
    cat.chargers.push_back(cehtest::charger_type("dc", 150.0, 40000.0, 1));
    const auto built = model::build_problem(cehtest::make_inputs(cat, {sc}));
    CHECK(with_backend(built.problem, "highs").status == SolveStatus::Infeasible);
    CHECK(oracle_solve(built.problem).status == SolveStatus::Infeasible);
}

TEST_CASE("a tiny time limit stops HiGHS") {
    const auto built = model::build_problem(cehtest::medium_instance(1.0));
    SolveOptions o;
    o.backend_id = "highs";
    o.time_limit_s = 1e-3;
    const auto out = solve(built.problem, o);
    CHECK((out.status == SolveStatus::TimeLimit || out.status == SolveStatus::Feasible));
}

// Every start assignment is enumerated by brute force and completed
// test-side: without storage or generation the grid carries the whole
// charger load and the cost is the larger of the two price bounds.
TEST_CASE("usage ordering removes only charger-swapped duplicates") {
    auto sc = cehtest::flat_scenario("day", 365, 4);
    sc.grid.buy_price = {0.20, 0.35, 0.15, 0.25};
    sc.sessions.push_back(cehtest::session("a", 1, 3, 900.0));
    sc.sessions.push_back(cehtest::session("b", 2, 4, 900.0));
    sc.sessions.push_back(cehtest::session("c", 1, 4, 900.0));
    TechnologyCatalog cat;
    cat.chargers.push_back(cehtest::charger_type("dc", 150.0, 40000.0, 3));

    struct Census {
        std::size_t feasible = 0;
        std::set<std::vector<int>> schedules;
        double best = kInf;
    };
    auto census = [&](bool symmetry) {
        ModelOptions opts;
        opts.symmetry_breaking = symmetry;
        const auto in = cehtest::make_inputs(cat, {sc}, opts);
        const auto built = model::build_problem(in);
        const auto& m = built.maps;
        const int n = built.problem.column_count();
        // (candidate, offset) choices of every vehicle
        std::vector<std::vector<std::pair<int, int>>> choices(3);
        for (int j = 0; j < n; ++j) {
            const auto& k = m.key(j);
            if (k.kind == VarKind::ChargeStart) choices[static_cast<std::size_t>(k.idx.v)].emplace_back(k.idx.c, k.idx.tr);
        }
        Census out;
        for (int q = 0; q < 8; ++q)
            for (const auto& ca : choices[0])
                for (const auto& cb : choices[1])
                    for (const auto& cc : choices[2]) {
                        std::vector<double> x(static_cast<std::size_t>(n), 0.0);
                        auto set = [&](VarKind kind, const VarIndex& idx, double value) {
                            x[static_cast<std::size_t>(m.at({kind, idx}))] = value;
                        };
                        std::vector<double> load(4, 0.0);
                        std::vector<std::vector<double>> power(3, std::vector<double>(4, 0.0));
                        const std::pair<int, int> picked[3] = {ca, cb, cc};
                        std::vector<int> signature;
                        for (int c = 0; c < 3; ++c) {
                            VarIndex i;
                            i.c = c;
                            set(VarKind::ChargerSelected, i, (q >> c) & 1);
                        }
                        signature.push_back(std::popcount(static_cast<unsigned>(q)));
                        for (int v = 0; v < 3; ++v) {
                            VarIndex i;
                            i.v = v;
                            i.c = picked[v].first;
                            i.tr = picked[v].second;
                            i.s = 0;
                            set(VarKind::ChargeStart, i, 1.0);
                            const int slot0 = sc.sessions[static_cast<std::size_t>(v)].arrival_slot - 1 + picked[v].second;
                            power[static_cast<std::size_t>(picked[v].first)][static_cast<std::size_t>(slot0)] += 150.0;
                            load[static_cast<std::size_t>(slot0)] += 150.0;
                            signature.push_back(slot0);
                        }
                        for (int t = 0; t < 4; ++t) {
                            VarIndex i;
                            i.t = t;
                            i.s = 0;
                            const auto ts = static_cast<std::size_t>(t);
                            set(VarKind::GridPower, i, load[ts]);
                            set(VarKind::GridCost, i, 6.0 * std::max(sc.grid.buy_price[ts] * load[ts], sc.grid.sell_price[ts] * load[ts]));
                            for (int c = 0; c < 3; ++c) {
                                i.c = c;
                                set(VarKind::ChargerPower, i, power[static_cast<std::size_t>(c)][ts]);
                            }
                        }
                        if (built.problem.max_violation(x) > 1e-9) continue;
                        ++out.feasible;
                        out.schedules.insert(signature);
                        out.best = std::min(out.best, built.problem.evaluate_objective(x));
                    }
        // the solvers agree with the census
        CHECK(oracle_solve(built.problem).objective == Approx(out.best).epsilon(1e-9));
        return out;
    };
    const auto with = census(true);
    const auto without = census(false);
    CHECK(with.schedules == without.schedules);
    CHECK(with.best == Approx(without.best).epsilon(1e-12));
    CHECK(with.feasible < without.feasible);
    CHECK(with.schedules.size() > 10);
    MESSAGE("assignments with ordering " << with.feasible << ", without " << without.feasible << ", schedules "
                                         << with.schedules.size());
}

}  // TEST_SUITE
