#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "ceh/errors.hpp"
#include "ceh/model.hpp"
#include "ceh/report.hpp"
#include "checks.hpp"
#include "instances.hpp"

using namespace ceh;
using doctest::Approx;

namespace {

struct Solved {
    ModelInputs inputs;
    model::BuiltModel built;
    SolveOutcome outcome;
    HubSolution solution;
};

Solved solve_with_oracle(ModelInputs in) {
    Solved s{std::move(in), {}, {}, {}};
    s.built = model::build_problem(s.inputs);
    s.outcome = oracle_solve(s.built.problem);
    REQUIRE(s.outcome.status == SolveStatus::Optimal);
    s.solution = extract_solution(s.outcome, s.built.maps, s.inputs);
    return s;
}

const Solved& tiny() {
    static const Solved s = solve_with_oracle(cehtest::tiny_example());
    return s;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

double set_column(std::vector<double>& x, const IndexMaps& m, VarKind kind, VarIndex idx, double value) {
    x[static_cast<std::size_t>(m.at({kind, idx}))] = value;
    return value;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("start offsets decode to absolute slots") {
    auto sc = cehtest::flat_scenario("day", 365, 24);
    sc.sessions.push_back(cehtest::session("ev", 5, 10, 180.0));
    TechnologyCatalog cat;
    cat.chargers.push_back(cehtest::charger_type("dc180", 180.0, 90000.0, 1));
    const auto in = cehtest::make_inputs(cat, {sc});
    const auto built = model::build_problem(in);
    SolveOutcome out;
    out.status = SolveStatus::Optimal;
    out.has_solution = true;
    out.values.assign(static_cast<std::size_t>(built.problem.column_count()), 0.0);
    VarIndex q;
    q.c = 0;
    set_column(out.values, built.maps, VarKind::ChargerSelected, q, 1.0);
    VarIndex x;
    x.v = 0;
    x.c = 0;
    x.tr = 2;
    x.s = 0;
    set_column(out.values, built.maps, VarKind::ChargeStart, x, 1.0);
    VarIndex slot;
    slot.t = 6;
    slot.s = 0;
    set_column(out.values, built.maps, VarKind::GridPower, slot, 180.0);
    set_column(out.values, built.maps, VarKind::GridCost, slot, 36.0);
    slot.c = 0;
    set_column(out.values, built.maps, VarKind::ChargerPower, slot, 180.0);
    out.objective = built.problem.evaluate_objective(out.values);

    const auto sol = extract_solution(out, built.maps, in);
    REQUIRE(sol.operations[0].sessions.size() == 1);
    const auto& a = sol.operations[0].sessions[0];
    CHECK(a.start_slot == 7);
    CHECK(a.duration_slots == 1);
    CHECK(a.power_kw == 180.0);
    CHECK(a.charger_id == "dc180#1");
    CHECK(sol.objective == Approx(out.objective));
}

TEST_CASE("the solved tiny example passes the validator") {
    const auto& s = tiny();
    CHECK(validate_solution(s.solution, s.inputs).empty());
    CHECK(cehtest::feasibility_failures(s.solution, s.inputs).empty());
    CHECK(s.solution.objective == Approx(cehtest::kTinyOracleObjective).epsilon(1e-9));
    CHECK(s.solution.operations[0].sessions.size() == 2);
    CHECK(s.solution.operations[1].sessions.size() == 1);
    MESSAGE("tiny design: pv " << s.solution.design.pv_units[0] << ", bess " << s.solution.design.bess_units[0]);
}

TEST_CASE("each family's perturbation is caught under its own name") {
    const auto& s = tiny();
    for (const auto& m : cehtest::family_mutations()) {
        CAPTURE(m.description);
        auto broken = s.solution;
        REQUIRE(m.apply(broken, s.inputs));
        const auto found = validate_solution(broken, s.inputs);
        bool named = false;
        for (const auto& v : found) named = named || v.family == m.family;
        CHECK_MESSAGE(named, to_string(m.family));
    }
}

TEST_CASE("extraction refuses a corrupted assignment") {
    const auto& s = tiny();
    auto bad = s.outcome;
    VarIndex slot;
    slot.t = 2;
    slot.s = 0;
    bad.values[static_cast<std::size_t>(s.built.maps.at({VarKind::GridCost, slot}))] -= 50.0;
    CHECK_THROWS_AS(extract_solution(bad, s.built.maps, s.inputs), ValidationFailure);
    CHECK_NOTHROW(decode_solution(bad, s.built.maps, s.inputs));
}

TEST_CASE("costs add up") {
    const auto& s = tiny();
    const auto k = compute_costs(s.solution, s.inputs);
    CHECK(k.total == Approx(k.capex_annualized + k.opex_grid + k.opex_maintenance + k.degradation).epsilon(1e-12));
    CHECK(k.total == Approx(s.solution.objective).epsilon(1e-9));
    const auto sh = k.shares();
    CHECK(sh.capex + sh.opex_grid + sh.opex_maintenance + sh.degradation == Approx(1.0).epsilon(1e-12));
    CHECK(CostBreakdown{}.shares().capex == 0.0);
}

TEST_CASE("energy balance closes and matches the written series") {
    const auto& s = tiny();
    const auto e = compute_energy_balance(s.solution, s.inputs);
    CHECK(e.production() == Approx(e.consumption()).epsilon(1e-9));

    const auto dir = cehtest::scratch_dir("balance");
    render_reports(s.solution, e, s.inputs, dir);
    std::map<std::string, double> weight;
    for (const auto& sc : s.inputs.scenarios.scenarios) weight[sc.id] = sc.occurrence_days * sc.delta_t_hours;
    double imported = 0.0;
    double exported = 0.0;
    const auto grid = read_csv(dir / "grid_power.csv");
    CHECK(grid.size() == 1 + 12);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double g = std::stod(grid[i][2]);
        (g > 0 ? imported : exported) += weight.at(grid[i][0]) * std::abs(g);
    }
    CHECK(e.grid_import == Approx(imported).epsilon(1e-9));
    CHECK(e.grid_export == Approx(exported).epsilon(1e-9));
    double charged = 0.0;
    const auto charging = read_csv(dir / "charging_power.csv");
    for (std::size_t i = 1; i < charging.size(); ++i) charged += weight.at(charging[i][0]) * std::stod(charging[i][2]);
    CHECK(e.ev_demand == Approx(charged).epsilon(1e-9));
    // every session delivers its duration times its rate
    double scheduled = 0.0;
    for (std::size_t k = 0; k < s.solution.operations.size(); ++k) {
        for (const auto& a : s.solution.operations[k].sessions)
            scheduled += weight.at(s.inputs.scenarios.scenarios[k].id) * a.power_kw * a.duration_slots;
    }
    CHECK(e.ev_demand == Approx(scheduled).epsilon(1e-9));

    const auto schedule = read_csv(dir / "schedule.csv");
    CHECK(schedule.size() == 1 + 3);
    CHECK(schedule[0] == std::vector<std::string>{"vehicle_id", "scenario_id", "charger_id", "start_slot", "duration_slots", "power_kw"});

    const auto soc = read_csv(dir / "soc.csv");
    const auto& bess = s.inputs.catalog.bess[0];
    REQUIRE(soc.size() > 1);
    CHECK(std::stod(soc[1][3]) == Approx(s.solution.design.bess_units[0] * bess.soc_init_frac * bess.unit_size_kwh).epsilon(1e-9));

    std::ifstream in(dir / "summary.json");
    const auto summary = nlohmann::json::parse(in);
    CHECK(summary["objective"].get<double>() == Approx(s.solution.objective).epsilon(1e-12));
    const auto& shares = summary["energy_kwh"]["production_shares"];
    CHECK(shares["pv"].get<double>() + shares["wt"].get<double>() + shares["grid_import"].get<double>() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a hub with nothing but chargers imports everything") {
    auto sc = cehtest::flat_scenario("day", 365, 4);
    sc.sessions.push_back(cehtest::session("ev", 2, 3, 900.0));
    TechnologyCatalog cat;
    cat.chargers.push_back(cehtest::charger_type("dc", 150.0, 40000.0, 1));
    const auto s = solve_with_oracle(cehtest::make_inputs(cat, {sc}));
    const auto e = compute_energy_balance(s.solution, s.inputs);
    CHECK(e.grid_import / e.production() == 1.0);
    CHECK(e.ev_demand == Approx(365 * 900.0));
    CHECK(e.battery_losses() == 0.0);
    CHECK(e.storage_change == 0.0);
}

TEST_CASE("a lossless idle battery keeps its energy") {
    TechnologyCatalog cat;
    auto b = cehtest::case_study_bess();
    b.charge_eff = 1.0;
    b.discharge_eff = 1.0;
    b.self_discharge_per_h = 0.0;
    b.max_units = 2;
    cat.bess.push_back(b);
    auto sc = cehtest::flat_scenario("day", 365, 4);
    const auto in = cehtest::make_inputs(cat, {sc});
    HubSolution sol;
    sol.design.bess_units = {2};
    ScenarioOperation op;
    op.scenario_id = "day";
    op.pv_kw.assign(4, 0.0);
    op.wt_kw.assign(4, 0.0);
    op.grid_kw.assign(4, 0.0);
    op.grid_cost.assign(4, 0.0);
    op.charge_kw = {std::vector<double>(4, 0.0)};
    op.discharge_kw = {std::vector<double>(4, 0.0)};
    op.soc_kwh = {std::vector<double>(5, 580.0)};
    op.mode = {std::vector<int>(4, 0)};
    sol.operations.push_back(op);
    sol.costs = compute_costs(sol, in);
    sol.objective = sol.costs.total;
    CHECK(validate_solution(sol, in).empty());
    const auto e = compute_energy_balance(sol, in);
    CHECK(e.battery_losses() == 0.0);
    CHECK(e.storage_change == 0.0);
    CHECK(e.production() == 0.0);

    sol.operations[0].soc_kwh[0][2] = 600.0;
    const auto v = validate_solution(sol, in);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].family == ConstraintFamily::SocRecursion);
    CHECK(v[0].message().find(std::string(to_string(ConstraintFamily::SocRecursion))) != std::string::npos);
}

TEST_CASE("grid values outside the contract are not rendered") {
    auto s = tiny().solution;
    s.operations[1].grid_kw[3] = 1e4;
    CHECK_THROWS_AS(render_reports(s, {}, tiny().inputs, cehtest::scratch_dir("overlimit")), ValidationFailure);
}

TEST_CASE("relaxation is tight at the optimum") {
    const auto& s = tiny();
    CHECK(price_relaxation_deviation(s.solution, s.inputs) <= 1e-6);
    CHECK(cehtest::relaxation_gap(s.solution, s.inputs) <= 1e-6);
}

TEST_CASE("charger labels") {
    const auto in = cehtest::tiny_example();
    CHECK(charger_label(in.catalog, 0) == "dc150#1");
    CHECK(charger_label(in.catalog, 1) == "dc150#2");
}

}  // TEST_SUITE
