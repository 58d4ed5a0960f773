#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <Highs.h>
#include <doctest.h>

#include "ceh/errors.hpp"
#include "ceh/milp.hpp"
#include "ceh/model.hpp"
#include "instances.hpp"

using namespace ceh;
using doctest::Approx;

namespace {

VariableRef var(VarKind kind, int t, double lo, double hi, VarType type = VarType::Continuous) {
    VariableRef v;
    v.key.kind = kind;
    v.key.idx.t = t;
    v.key.idx.s = 0;
    v.lower = lo;
    v.upper = hi;
    v.type = type;
    return v;
}

}  // namespace

TEST_SUITE("milp") {

TEST_CASE("rows are normalized") {
    MilpProblem p;
    const int a = p.add_column(var(VarKind::GridPower, 0, -5, 5));
    const int b = p.add_column(var(VarKind::GridPower, 1, -5, 5));
    p.add_row({{b, 1.0}, {a, 2.0}, {b, 2.0}, {a, -2.0}}, Relation::LessEqual, 3.0, ConstraintFamily::PowerBalance);
    REQUIRE(p.row_count() == 1);
    CHECK(p.rows()[0].terms == std::vector<Term>{{b, 3.0}});
    CHECK(p.nonzero_count() == 1);
    CHECK_THROWS_AS(p.add_row({{7, 1.0}}, Relation::Equal, 0.0, ConstraintFamily::PowerBalance), std::out_of_range);
}

TEST_CASE("objective and violations of an assignment") {
    MilpProblem p;
    const int x = p.add_column(var(VarKind::PvUnits, -1, 0, 3, VarType::Integer));
    const int y = p.add_column(var(VarKind::GridPower, 0, -10, 10));
    p.add_cost(x, 2.0);
    p.add_cost(y, -1.0);
    p.set_objective_constant(4.0);
    p.add_row({{x, 1.0}, {y, 1.0}}, Relation::Equal, 5.0, ConstraintFamily::PowerBalance);
    p.add_row({{y, 1.0}}, Relation::GreaterEqual, 1.0, ConstraintFamily::PriceRelaxation);
    CHECK(p.evaluate_objective({2.0, 3.0}) == Approx(5.0));
    CHECK(p.max_violation({2.0, 3.0}) == 0.0);
    CHECK(p.max_violation({2.0, 2.0}) == Approx(1.0));
    CHECK(p.max_violation({4.0, 1.0}) == Approx(1.0));  // bound
    CHECK(p.max_violation({5.0, 0.0}) == Approx(2.0));
    CHECK(p.integer_column_count() == 1);
}

TEST_CASE("structure checks") {
    MilpProblem p;
    p.add_column(var(VarKind::PvUnits, -1, 0, kInf, VarType::Integer));
    CHECK_THROWS_AS(p.check_structure(), Error);
    MilpProblem q;
    q.add_column(var(VarKind::GridPower, 0, 3, 1));
    CHECK_THROWS_AS(q.check_structure(), Error);
}

TEST_CASE("index maps are bidirectional") {
    IndexMaps maps;
    VariableKey k1{VarKind::GridPower, {}};
    k1.idx.t = 3;
    VariableKey k2{VarKind::GridCost, {}};
    k2.idx.t = 3;
    maps.insert(k1, 0);
    maps.insert(k2, 1);
    CHECK(maps.at(k2) == 1);
    CHECK(maps.key(0) == k1);
    CHECK_FALSE(maps.find(VariableKey{VarKind::SocEnergy, {}}).has_value());
    CHECK_THROWS_AS(maps.at(VariableKey{VarKind::SocEnergy, {}}), std::out_of_range);
}

TEST_CASE("column and row names are unique") {
    const auto built = model::build_problem(cehtest::tiny_example());
    std::set<std::string> names;
    for (const auto& c : built.problem.columns()) {
        CHECK(c.name().find(' ') == std::string::npos);
        names.insert(c.name());
    }
    CHECK(names.size() == built.problem.columns().size());
    std::set<std::string> rows;
    for (int i = 0; i < built.problem.row_count(); ++i) rows.insert(built.problem.row_name(i));
    CHECK(rows.size() == static_cast<std::size_t>(built.problem.row_count()));
}

TEST_CASE("MPS export reads back into an independent solver") {
    const auto built = model::build_problem(cehtest::tiny_example());
    const auto dir = cehtest::scratch_dir("mps");
    {
        std::ofstream out(dir / "tiny.mps");
        write_mps(built.problem, out, "tiny");
    }
    Highs highs;
    highs.setOptionValue("output_flag", false);
    highs.setOptionValue("mip_rel_gap", 1e-9);
    REQUIRE(highs.readModel((dir / "tiny.mps").string()) == HighsStatus::kOk);
    const auto& lp = highs.getLp();
    CHECK(lp.num_col_ == built.problem.column_count());
    CHECK(lp.num_row_ == built.problem.row_count());
    int integers = 0;
    for (auto t : lp.integrality_) integers += t == HighsVarType::kInteger;
    CHECK(integers == built.problem.integer_column_count());
    REQUIRE(highs.run() == HighsStatus::kOk);
    REQUIRE(highs.getModelStatus() == HighsModelStatus::kOptimal);
    CHECK(highs.getInfo().objective_function_value == Approx(cehtest::kTinyOracleObjective).epsilon(1e-6));
}

TEST_CASE("constraint listing names every family present") {
    const auto built = model::build_problem(cehtest::tiny_example());
    std::ostringstream out;
    write_constraint_dump(built.problem, out);
    const auto text = out.str();
    for (auto family : {ConstraintFamily::SocRecursion, ConstraintFamily::Occupancy, ConstraintFamily::SymmetryUsage,
                        ConstraintFamily::PriceRelaxation, ConstraintFamily::PowerBalance}) {
        CHECK(text.find(std::string(to_string(family))) != std::string::npos);
    }
}

TEST_CASE("family names") {
    CHECK(all_families().size() == static_cast<std::size_t>(kFamilyCount));
    std::set<std::string_view> names;
    for (auto f : all_families()) names.insert(to_string(f));
    CHECK(names.size() == static_cast<std::size_t>(kFamilyCount));
}

}  // TEST_SUITE
