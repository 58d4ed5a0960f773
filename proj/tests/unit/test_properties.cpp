#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "ceh/model.hpp"
#include "ceh/report.hpp"
#include "ceh/solve.hpp"
#include "checks.hpp"
#include "instances.hpp"

using namespace ceh;
using doctest::Approx;

namespace {

bool enumerable(const MilpProblem& p) { return enumeration_size(p) <= EnumerationCaps{}.max_combinations; }

/// Seeds whose instances the oracle can enumerate.
std::vector<std::uint64_t> enumerable_seeds(std::uint64_t first, int count) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t seed = first; static_cast<int>(out.size()) < count; ++seed) {
        if (enumerable(model::build_problem(cehtest::random_tiny(seed)).problem)) out.push_back(seed);
    }
    return out;
}

SolveOutcome highs(const MilpProblem& p) {
    SolveOptions o;
    o.backend_id = "highs";
    o.relative_gap = 1e-9;
    return solve(p, o);
}

void scale_money(ModelInputs& in, double k) {
    for (auto& t : in.catalog.pv) t.invest_cost *= k, t.maintenance_cost *= k;
    for (auto& t : in.catalog.wt) t.invest_cost *= k, t.maintenance_cost *= k;
    for (auto& t : in.catalog.bess) t.invest_cost *= k, t.maintenance_cost *= k, t.degradation_cost_per_kw *= k;
    for (auto& t : in.catalog.chargers) t.invest_cost *= k, t.maintenance_cost *= k;
    for (auto& s : in.scenarios.scenarios) {
        for (auto& p : s.grid.buy_price) p *= k;
        for (auto& p : s.grid.sell_price) p *= k;
    }
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("random instances: oracle solutions are feasible and tight") {
    int solved = 0;
    for (auto seed : enumerable_seeds(100, 30)) {
        CAPTURE(seed);
        const auto in = cehtest::random_tiny(seed);
        const auto built = model::build_problem(in);
        const auto out = oracle_solve(built.problem);
        if (out.status != SolveStatus::Optimal) {
            CHECK(out.status == SolveStatus::Infeasible);
            continue;
        }
        ++solved;
        const auto sol = extract_solution(out, built.maps, in);
        CHECK(validate_solution(sol, in).empty());
        CHECK(cehtest::feasibility_failures(sol, in).empty());
        CHECK(cehtest::relaxation_gap(sol, in) <= 1e-6);
        const auto e = compute_energy_balance(sol, in);
        CHECK(e.production() == Approx(e.consumption()).epsilon(1e-9));
        CHECK(sol.costs.total == Approx(out.objective).epsilon(1e-9));
    }
    CHECK(solved >= 20);
}

TEST_CASE("random instances: HiGHS matches the oracle") {
    for (auto seed : enumerable_seeds(500, 12)) {
        CAPTURE(seed);
        const auto in = cehtest::random_tiny(seed);
        const auto built = model::build_problem(in);
        const auto a = oracle_solve(built.problem);
        const auto b = highs(built.problem);
        REQUIRE(a.status == b.status);
        if (a.status != SolveStatus::Optimal) continue;
        CHECK(b.objective == Approx(a.objective).epsilon(1e-6));
        const auto sol = extract_solution(b, built.maps, in);
        CHECK(cehtest::feasibility_failures(sol, in).empty());
    }
}

TEST_CASE("scaling every price and cost scales the optimum") {
    for (auto seed : enumerable_seeds(900, 8)) {
        CAPTURE(seed);
        auto in = cehtest::random_tiny(seed);
        const auto base = oracle_solve(model::build_problem(in).problem);
        scale_money(in, 2.0);
        const auto doubled = oracle_solve(model::build_problem(in).problem);
        REQUIRE(base.status == doubled.status);
        if (base.status == SolveStatus::Optimal) CHECK(doubled.objective == Approx(2.0 * base.objective).epsilon(1e-9));
    }
}

TEST_CASE("a tighter connection never lowers the optimum") {
    for (auto seed : enumerable_seeds(1300, 8)) {
        CAPTURE(seed);
        auto in = cehtest::random_tiny(seed);
        const auto loose = oracle_solve(model::build_problem(in).problem);
        for (auto& s : in.scenarios.scenarios)
            for (auto& w : s.grid.withdrawal_limit_kw) w *= 0.6;
        const auto tight = oracle_solve(model::build_problem(in).problem);
        if (tight.status != SolveStatus::Optimal) continue;
        REQUIRE(loose.status == SolveStatus::Optimal);
        CHECK(tight.objective >= loose.objective - 1e-6 * std::max(1.0, std::abs(loose.objective)));
    }
}

TEST_CASE("solving is deterministic") {
    const auto in = cehtest::medium_instance(1.0);
    const auto built = model::build_problem(in);
    SolveOptions o;
    o.backend_id = "highs";
    o.time_limit_s = 120.0;
    const auto a = solve(built.problem, o);
    const auto b = solve(built.problem, o);
    REQUIRE(a.has_solution);
    CHECK(a.status == b.status);
    CHECK(a.values == b.values);
    CHECK(a.objective == b.objective);
}

TEST_CASE("symmetry rows leave the optimum unchanged") {
    for (auto seed : enumerable_seeds(1700, 8)) {
        CAPTURE(seed);
        auto in = cehtest::random_tiny(seed);
        const auto with = oracle_solve(model::build_problem(in).problem);
        in.options.symmetry_breaking = false;
        const auto built = model::build_problem(in);
        if (!enumerable(built.problem)) continue;
        const auto without = oracle_solve(built.problem);
        REQUIRE(with.status == without.status);
        if (with.status == SolveStatus::Optimal) CHECK(with.objective == Approx(without.objective).epsilon(1e-9));
    }
}

}  // TEST_SUITE
