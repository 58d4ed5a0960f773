#pragma once

#include <vector>

#include "ceh/catalog.hpp"
#include "ceh/ingest.hpp"
#include "ceh/milp.hpp"

namespace ceh::model {

/// Charging options of one session on one candidate charger.
struct SessionOption {
    int candidate = 0;
    int tau = 0;     // slots of charging at constant power
    int window = 0;  // admissible start offsets 0..window-1
    double rate_kw = 0.0;
};

/// Options of every session of a scenario, indexed [vehicle][candidate].
std::vector<std::vector<SessionOption>> session_options(const TechnologyCatalog& catalog, const Scenario& scenario);

/// Owns the problem under construction. The sub-builders below register the
/// variables they introduce and append their rows; later builders look up
/// earlier columns through the maps.
class ProblemBuilder {
public:
    ProblemBuilder(ModelOptions options, int slot_count, int scenario_count);

    int add_variable(VarKind kind, const VarIndex& idx, double lower, double upper, VarType type);
    void add_row(std::vector<Term> terms, Relation relation, double rhs, ConstraintFamily family,
                 const VarIndex& where = {});
    int column(VarKind kind, const VarIndex& idx) const { return maps_.at({kind, idx}); }
    std::optional<int> find(VarKind kind, const VarIndex& idx) const { return maps_.find({kind, idx}); }

    MilpProblem& problem() { return problem_; }
    const MilpProblem& problem() const { return problem_; }
    IndexMaps& maps() { return maps_; }
    const ModelOptions& options() const { return options_; }

private:
    void check_size() const;

    ModelOptions options_;
    MilpProblem problem_;
    IndexMaps maps_;
};

struct BuiltModel {
    MilpProblem problem;
    IndexMaps maps;
};

/// Assembles the complete sizing-and-scheduling MILP.
/// Throws InfeasibleInstance when a vehicle fits no candidate charger and
/// ModelSizeError when the configured column or row cap is exceeded.
BuiltModel build_problem(const TechnologyCatalog& catalog, const ScenarioSet& scenarios,
                         const EconomicParams& economics, const ModelOptions& options = {});
BuiltModel build_problem(const ModelInputs& inputs);

/// n_p, n_w, n_b and q_c columns plus the installation-order rows between
/// identical candidate chargers.
void add_design_variables(ProblemBuilder& builder, const TechnologyCatalog& catalog);

/// Grid power bounded by the connection contract, trading cost bounded
/// below by both the purchase and the selling price.
void add_grid_constraints(ProblemBuilder& builder, const Scenario& scenario, int s);

/// SOC recursion, SOC bounds, initial SOC, power caps and the big-M
/// exclusivity of charging and discharging. No-op without BESS technologies.
void add_bess_constraints(ProblemBuilder& builder, const TechnologyCatalog& catalog, const Scenario& scenario, int s);

/// Start binaries over each feasible window, charger linking, exactly one
/// start per vehicle, occupancy, charger power and usage ordering rows.
void add_session_constraints(ProblemBuilder& builder, const TechnologyCatalog& catalog, const Scenario& scenario,
                             int s);

/// PV + wind + grid + discharge - charge = charger load, per slot.
void add_power_balance(ProblemBuilder& builder, const TechnologyCatalog& catalog, const Scenario& scenario, int s);

/// Annualized capital cost, maintenance, occurrence-weighted trading cost
/// and BESS degradation.
void build_objective(ProblemBuilder& builder, const TechnologyCatalog& catalog, const ScenarioSet& scenarios,
                     const EconomicParams& economics);

/// Annualized capital cost plus maintenance of one unit.
double annual_unit_cost(double invest_cost, double maintenance_cost, double discount_rate, double lifetime_years);

}  // namespace ceh::model
