#include <algorithm>
#include <cmath>
#include <map>

#include <doctest.h>

#include "ceh/errors.hpp"
#include "ceh/model.hpp"
#include "ceh/synthetic.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace ceh;
using doctest::Approx;
using F = ConstraintFamily;

namespace {

VarIndex slot(int t, int s = 0) {
    VarIndex i;
    i.t = t;
    i.s = s;
    return i;
}

VarIndex bess_slot(int b, int t, int s = 0) {
    VarIndex i = slot(t, s);
    i.b = b;
    return i;
}

VarIndex charger_slot(int c, int t, int s = 0) {
    VarIndex i = slot(t, s);
    i.c = c;
    return i;
}

VarIndex start(int v, int c, int tr, int s = 0) {
    VarIndex i;
    i.v = v;
    i.c = c;
    i.tr = tr;
    i.s = s;
    return i;
}

VarIndex design(VarKind kind, int k) {
    VarIndex i;
    if (kind == VarKind::PvUnits) i.p = k;
    if (kind == VarKind::WtUnits) i.w = k;
    if (kind == VarKind::BessUnits) i.b = k;
    if (kind == VarKind::ChargerSelected) i.c = k;
    return i;
}

std::vector<const Constraint*> rows_of(const MilpProblem& p, F family, const VarIndex& where) {
    std::vector<const Constraint*> out;
    for (const auto& r : p.rows())
        if (r.family == family && r.where == where) out.push_back(&r);
    return out;
}

double coef(const Constraint& row, int column) {
    for (const auto& t : row.terms)
        if (t.column == column) return t.coef;
    return 0.0;
}

/// Solves an equality row for `unknown` given values of every other column.
double solve_row_for(const Constraint& row, int unknown, const std::map<int, double>& values) {
    double rest = 0.0;
    for (const auto& t : row.terms) {
        if (t.column == unknown) continue;
        rest += t.coef * values.at(t.column);
    }
    return (row.rhs - rest) / coef(row, unknown);
}

TechnologyCatalog chargers_only(double power, int candidates) {
    TechnologyCatalog cat;
    cat.chargers.push_back(cehtest::charger_type("dc", power, 40000.0, candidates));
    return cat;
}

ModelInputs bess_day(double self_discharge) {
    TechnologyCatalog cat;
    auto b = cehtest::case_study_bess();
    b.self_discharge_per_h = self_discharge;
    cat.bess.push_back(b);
    return cehtest::make_inputs(cat, {cehtest::flat_scenario("day", 365, 24)});
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("hand-counted rows of a one-session instance") {
    auto sc = cehtest::flat_scenario("day", 365, 4);
    // 800 kWh at 150 kW takes 6 h, one 6 h slot; parked all day
    sc.sessions.push_back(cehtest::session("ev", 1, 4, 800.0));
    const auto in = cehtest::make_inputs(chargers_only(150.0, 2), {sc});
    const auto built = model::build_problem(in);
    const auto& p = built.problem;
    const auto rows = cehtest::count_rows(p);

    int starts = 0;
    for (std::size_t j = 0; j < built.maps.size(); ++j) {
        const auto& key = built.maps.key(static_cast<int>(j));
        if (key.kind != VarKind::ChargeStart) continue;
        ++starts;
        CHECK(key.idx.tr >= 0);
        CHECK(key.idx.tr < 4);
    }
    CHECK(starts == 8);
    CHECK(rows.at(F::ExactlyOneStart) == 1);
    CHECK(rows.at(F::ChargerLinking) == 8);
    CHECK(rows.at(F::Occupancy) == 8);
    CHECK(rows.at(F::ChargerPower) == 8);
    CHECK(rows.at(F::SymmetryInstall) == 1);
    CHECK(rows.at(F::SymmetryUsage) == 4);
    CHECK(rows.at(F::PowerBalance) == 4);
    CHECK(rows.at(F::PriceRelaxation) == 8);
    CHECK(rows.at(F::SocRecursion) == 0);

    // occupancy of candidate 0 in slot 3 holds exactly the start at offset 2
    const auto occ = rows_of(p, F::Occupancy, charger_slot(0, 2));
    REQUIRE(occ.size() == 1);
    CHECK(occ[0]->terms == std::vector<Term>{{built.maps.at({VarKind::ChargeStart, start(0, 0, 2)}), 1.0}});
    CHECK(occ[0]->rhs == 1.0);

    // nobody else can occupy candidate 0, so candidate 1 is never usable
    const auto usage = rows_of(p, F::SymmetryUsage, start(0, 1, 1));
    REQUIRE(usage.size() == 1);
    CHECK(usage[0]->terms == std::vector<Term>{{built.maps.at({VarKind::ChargeStart, start(0, 1, 1)}), 1.0}});
    CHECK(usage[0]->rhs == 0.0);

    const auto install = rows_of(p, F::SymmetryInstall, design(VarKind::ChargerSelected, 1));
    REQUIRE(install.size() == 1);
    CHECK(coef(*install[0], built.maps.at({VarKind::ChargerSelected, design(VarKind::ChargerSelected, 1)})) == 1.0);
    CHECK(coef(*install[0], built.maps.at({VarKind::ChargerSelected, design(VarKind::ChargerSelected, 0)})) == -1.0);
}

TEST_CASE("usage ordering lists the other vehicles on the lower candidate") {
    auto sc = cehtest::flat_scenario("day", 365, 6);
    // 400 kWh at 150 kW is 3 h, one 4 h slot
    sc.sessions.push_back(cehtest::session("a", 1, 6, 400.0));
    sc.sessions.push_back(cehtest::session("b", 2, 6, 400.0));
    const auto in = cehtest::make_inputs(chargers_only(150.0, 2), {sc});
    const auto built = model::build_problem(in);
    // b starting on candidate 1 at its offset 0 (slot 2) needs a on candidate 0 in slot 2,
    // which a does when it starts at offset 1
    const auto rows = rows_of(built.problem, F::SymmetryUsage, start(1, 1, 0));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0]->terms.size() == 2);
    CHECK(coef(*rows[0], built.maps.at({VarKind::ChargeStart, start(1, 1, 0)})) == 1.0);
    CHECK(coef(*rows[0], built.maps.at({VarKind::ChargeStart, start(0, 0, 1)})) == -1.0);
}

TEST_CASE("row and column counts follow the closed form") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto in = cehtest::random_tiny(seed);
        in.options.symmetry_breaking = seed % 3 != 0;
        in.options.per_technology_bess_mode = seed % 4 == 0;
        const auto built = model::build_problem(in);
        const auto expected = cehtest::expected_size(in);
        CAPTURE(seed);
        CHECK(cehtest::count_rows(built.problem) == expected.rows);
        CHECK(built.problem.column_count() == expected.columns);
        CHECK(built.problem.integer_column_count() == expected.integer_columns);
        CHECK(built.maps.size() == static_cast<std::size_t>(built.problem.column_count()));
    }
}

TEST_CASE("case-study shaped instance builds") {
    const auto in = synthetic::case_study();
    const auto built = model::build_problem(in);
    const auto expected = cehtest::expected_size(in);
    CHECK(cehtest::count_rows(built.problem) == expected.rows);
    CHECK(built.problem.column_count() == expected.columns);
    CHECK(built.maps.scenario_count == 24);
    CHECK(built.maps.slot_count == 24);
    CHECK(built.maps.candidate_count == 12);
    MESSAGE("case study: " << built.problem.column_count() << " columns, " << built.problem.row_count() << " rows");
}

TEST_CASE("building is deterministic") {
    const auto in = synthetic::case_study({2023, 6, 3, 9});
    CHECK(model::build_problem(in).problem == model::build_problem(in).problem);
}

TEST_CASE("initial SOC and recursion") {
    const auto in = bess_day(1e-4);
    const auto built = model::build_problem(in);
    const auto& p = built.problem;
    const int n = built.maps.at({VarKind::BessUnits, design(VarKind::BessUnits, 0)});
    const int e0 = built.maps.at({VarKind::SocEnergy, bess_slot(0, 0)});
    const int e1 = built.maps.at({VarKind::SocEnergy, bess_slot(0, 1)});
    const int ch = built.maps.at({VarKind::BessCharge, bess_slot(0, 0)});
    const int dis = built.maps.at({VarKind::BessDischarge, bess_slot(0, 0)});

    const auto init = rows_of(p, F::InitialSoc, bess_slot(0, 0));
    REQUIRE(init.size() == 1);
    CHECK(solve_row_for(*init[0], e0, {{n, 1.0}}) == Approx(290.0).epsilon(1e-12));

    const auto rec = rows_of(p, F::SocRecursion, bess_slot(0, 0));
    REQUIRE(rec.size() == 1);
    CHECK(solve_row_for(*rec[0], e1, {{e0, 290.0}, {ch, 100.0}, {dis, 0.0}, {n, 1.0}}) == Approx(384.942).epsilon(1e-12));

    const auto lossless = model::build_problem(bess_day(0.0));
    const auto flat = rows_of(lossless.problem, F::SocRecursion, bess_slot(0, 5));
    REQUIRE(flat.size() == 1);
    const int e5 = lossless.maps.at({VarKind::SocEnergy, bess_slot(0, 5)});
    const int e6 = lossless.maps.at({VarKind::SocEnergy, bess_slot(0, 6)});
    CHECK(solve_row_for(*flat[0], e6,
                        {{e5, 321.0}, {lossless.maps.at({VarKind::BessCharge, bess_slot(0, 5)}), 0.0},
                         {lossless.maps.at({VarKind::BessDischarge, bess_slot(0, 5)}), 0.0}, {n, 1.0}}) == 321.0);
}

TEST_CASE("SOC bounds cover every state and exclusivity uses the full fleet rating") {
    const auto in = bess_day(1e-4);
    const auto built = model::build_problem(in);
    const auto& p = built.problem;
    const int n = built.maps.at({VarKind::BessUnits, design(VarKind::BessUnits, 0)});
    const auto last = rows_of(p, F::SocBounds, bess_slot(0, 24));
    REQUIRE(last.size() == 2);
    const auto excl = rows_of(p, F::BessExclusivity, bess_slot(0, 3));
    REQUIRE(excl.size() == 2);
    const int mode = built.maps.at({VarKind::BessMode, slot(3)});
    CHECK(coef(*excl[0], mode) == -100 * 300.0);
    CHECK(coef(*excl[1], mode) == 100 * 300.0);
    CHECK(excl[1]->rhs == 100 * 300.0);
    const auto caps = rows_of(p, F::BessPowerCaps, bess_slot(0, 3));
    REQUIRE(caps.size() == 2);
    CHECK(coef(*caps[0], n) == -300.0);
}

TEST_CASE("price relaxation rows bound the trading cost by both prices") {
    auto sc = cehtest::flat_scenario("day", 365, 24);
    sc.grid.buy_price[0] = 0.3;
    sc.grid.sell_price[0] = 0.1;
    const auto in = cehtest::make_inputs({}, {sc});
    const auto built = model::build_problem(in);
    const int g = built.maps.at({VarKind::GridPower, slot(0)});
    const int c = built.maps.at({VarKind::GridCost, slot(0)});
    const auto rows = rows_of(built.problem, F::PriceRelaxation, slot(0));
    REQUIRE(rows.size() == 2);
    auto cheapest = [&](double grid) {
        double lowest = -kInf;
        for (const auto* r : rows) {
            REQUIRE(r->relation == Relation::GreaterEqual);
            lowest = std::max(lowest, (r->rhs - coef(*r, g) * grid) / coef(*r, c));
        }
        return lowest;
    };
    CHECK(cheapest(100.0) == Approx(30.0));
    CHECK(cheapest(-100.0) == Approx(-10.0));
    CHECK(cheapest(0.0) == 0.0);

    const auto& col = built.problem.columns()[static_cast<std::size_t>(g)];
    CHECK(col.lower == -1000.0);
    CHECK(col.upper == 1000.0);
}

TEST_CASE("power balance coefficients") {
    TechnologyCatalog cat = chargers_only(180.0, 1);
    cat.pv.push_back({});
    cat.pv[0].id = "pv";
    cat.wt.push_back(synthetic::case_study_catalog().wt.front());
    auto sc = cehtest::flat_scenario("day", 365, 24);
    sc.sessions.push_back(cehtest::session("ev", 5, 7, 180.0));
    sc.irradiance_kw_m2[12] = 0.8;
    // measured speed that reaches exactly the rated 13 m/s at hub height
    sc.wind_speed_m_s[12] = 13.0 / std::pow(6.0, 0.143);
    const auto in = cehtest::make_inputs(cat, {sc});
    const auto built = model::build_problem(in);
    const auto& m = built.maps;
    const int pv = m.at({VarKind::PvUnits, design(VarKind::PvUnits, 0)});
    const int wt = m.at({VarKind::WtUnits, design(VarKind::WtUnits, 0)});

    const auto noon = rows_of(built.problem, F::PowerBalance, slot(12));
    REQUIRE(noon.size() == 1);
    CHECK(coef(*noon[0], wt) == Approx(500.0).epsilon(1e-9));
    CHECK(coef(*noon[0], pv) == Approx(0.2 * 2.58 * 0.8).epsilon(1e-12));

    const auto night = rows_of(built.problem, F::PowerBalance, slot(4));
    REQUIRE(night.size() == 1);
    CHECK(coef(*night[0], pv) == 0.0);
    CHECK(coef(*night[0], wt) == 0.0);
    CHECK(coef(*night[0], m.at({VarKind::GridPower, slot(4)})) == 1.0);
    const int power = m.at({VarKind::ChargerPower, charger_slot(0, 4)});
    CHECK(coef(*night[0], power) == -1.0);
    CHECK(night[0]->relation == Relation::Equal);
    CHECK(night[0]->rhs == 0.0);

    const auto load = rows_of(built.problem, F::ChargerPower, charger_slot(0, 4));
    REQUIRE(load.size() == 1);
    CHECK(coef(*load[0], power) == 1.0);
    CHECK(coef(*load[0], m.at({VarKind::ChargeStart, start(0, 0, 0)})) == -180.0);
}

TEST_CASE("objective coefficients") {
    TechnologyCatalog cat;
    auto type = cehtest::charger_type("dc180", 180.0, 90000.0, 1);
    type.maintenance_cost = 900.0;
    cat.chargers.push_back(type);
    cat.bess.push_back(cehtest::case_study_bess());
    auto sc = cehtest::flat_scenario("day", 365, 24);
    const auto in = cehtest::make_inputs(cat, {sc});
    const auto built = model::build_problem(in);
    const auto& obj = built.problem.objective();
    const auto& m = built.maps;

    const double q = obj[static_cast<std::size_t>(m.at({VarKind::ChargerSelected, design(VarKind::ChargerSelected, 0)}))];
    CHECK(q == Approx(cehtest::kappa_annuity(0.0275, 10) * 90000.0 + 900.0).epsilon(1e-12));
    CHECK(q == Approx(10416.5748 + 900.0).epsilon(1e-8));
    CHECK(model::annual_unit_cost(90000.0, 900.0, 0.0275, 10) == Approx(q).epsilon(1e-15));

    // 1000 kWh moved through the battery in one day at 0.03 EUR/kW
    std::vector<double> x(static_cast<std::size_t>(built.problem.column_count()), 0.0);
    for (int t = 0; t < 5; ++t) {
        x[static_cast<std::size_t>(m.at({VarKind::BessCharge, bess_slot(0, t)}))] = 100.0;
        x[static_cast<std::size_t>(m.at({VarKind::BessDischarge, bess_slot(0, t + 10)}))] = 100.0;
    }
    CHECK(built.problem.evaluate_objective(x) == Approx(365 * 30.0).epsilon(1e-12));
    CHECK(obj[static_cast<std::size_t>(m.at({VarKind::GridCost, slot(7)}))] == 365.0);
    CHECK(obj[static_cast<std::size_t>(m.at({VarKind::GridPower, slot(7)}))] == 0.0);
}

TEST_CASE("per-technology storage modes") {
    TechnologyCatalog cat;
    cat.bess.push_back(cehtest::case_study_bess());
    cat.bess.push_back(cehtest::case_study_bess());
    cat.bess[1].id = "second";
    ModelOptions shared;
    ModelOptions split;
    split.per_technology_bess_mode = true;
    const auto a = model::build_problem(cehtest::make_inputs(cat, {cehtest::flat_scenario("d", 365, 24)}, shared));
    const auto b = model::build_problem(cehtest::make_inputs(cat, {cehtest::flat_scenario("d", 365, 24)}, split));
    CHECK(b.problem.integer_column_count() - a.problem.integer_column_count() == 24);
    CHECK(a.maps.find({VarKind::BessMode, slot(0)}).has_value());
    CHECK(b.maps.find({VarKind::BessMode, bess_slot(1, 0)}).has_value());
}

TEST_CASE("symmetry rows can be switched off") {
    auto in = cehtest::tiny_example();
    in.options.symmetry_breaking = false;
    const auto rows = cehtest::count_rows(model::build_problem(in).problem);
    CHECK(rows.at(F::SymmetryInstall) == 0);
    CHECK(rows.at(F::SymmetryUsage) == 0);
}

TEST_CASE("a vehicle that fits no charger makes the instance infeasible") {
    auto sc = cehtest::flat_scenario("day", 365, 24);
    sc.sessions.push_back(cehtest::session("ev", 3, 4, 900.0));
    CHECK_THROWS_AS(model::build_problem(chargers_only(150.0, 2), ScenarioSet{{sc}, 365}, EconomicParams{}), InfeasibleInstance);
}

TEST_CASE("size caps") {
    auto in = synthetic::case_study({2023, 14, 6, 1});
    in.options.max_rows = 1000;
    try {
        model::build_problem(in);
        FAIL("expected ModelSizeError");
    } catch (const ModelSizeError& e) {
        CHECK(e.rows() > 1000);
    }
}

}  // TEST_SUITE
