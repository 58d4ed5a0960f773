#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ceh/ingest.hpp"
#include "ceh/milp.hpp"
#include "ceh/solve.hpp"

namespace ceh {

struct SessionAssignment {
    int vehicle = 0;  // index into the scenario's session list
    std::string vehicle_id;
    int candidate = 0;
    std::string charger_id;
    int start_slot = 1;  // 1-based
    int duration_slots = 0;
    double power_kw = 0.0;

    bool operator==(const SessionAssignment&) const = default;
};

/// Operation of one representative day. Per-BESS series are indexed [b][t];
/// soc_kwh[b] has slot_count + 1 entries, entry t being the state at the
/// start of slot t + 1 and the last one the end-of-day state.
struct ScenarioOperation {
    std::string scenario_id;
    std::vector<double> pv_kw;
    std::vector<double> wt_kw;
    std::vector<double> grid_kw;
    std::vector<double> grid_cost;
    std::vector<std::vector<double>> charge_kw;
    std::vector<std::vector<double>> discharge_kw;
    std::vector<std::vector<double>> soc_kwh;
    std::vector<std::vector<int>> mode;  // 1 = charging allowed
    std::vector<std::vector<double>> charger_kw;  // [candidate][t]
    std::vector<SessionAssignment> sessions;

    bool operator==(const ScenarioOperation&) const = default;
};

struct HubDesign {
    std::vector<int> pv_units;
    std::vector<int> wt_units;
    std::vector<int> bess_units;
    std::vector<int> chargers;  // q per candidate, 0 or 1

    bool operator==(const HubDesign&) const = default;
};

struct CostBreakdown {
    double capex_annualized = 0.0;
    double opex_grid = 0.0;
    double opex_maintenance = 0.0;
    double degradation = 0.0;
    double total = 0.0;

    struct Shares {
        double capex = 0.0;
        double opex_grid = 0.0;
        double opex_maintenance = 0.0;
        double degradation = 0.0;
    };
    /// Each part over the total; all zero when the total is zero.
    Shares shares() const;
};

struct HubSolution {
    SolveStatus status = SolveStatus::Optimal;
    double objective = 0.0;
    HubDesign design;
    std::vector<ScenarioOperation> operations;
    CostBreakdown costs;
};

/// Yearly energy in kWh, weighted by scenario occurrence.
struct EnergyBalance {
    double pv = 0.0;
    double wt = 0.0;
    double grid_import = 0.0;

    double ev_demand = 0.0;
    double grid_export = 0.0;
    double battery_conversion_loss = 0.0;
    double battery_self_discharge = 0.0;
    /// End-of-day minus start-of-day stored energy; signed.
    double storage_change = 0.0;

    double production() const { return pv + wt + grid_import; }
    double consumption() const {
        return ev_demand + grid_export + battery_conversion_loss + battery_self_discharge + storage_change;
    }
    double battery_losses() const { return battery_conversion_loss + battery_self_discharge; }
};

struct Violation {
    ConstraintFamily family{};
    std::string where;
    double amount = 0.0;

    std::string message() const;
};

/// Re-checks every constraint family of a solution against the raw inputs.
/// Nothing is taken from the MILP rows: windows, durations, rates and unit
/// profiles are recomputed here. Tolerances are relative to the magnitude of
/// the quantities compared.
std::vector<Violation> validate_solution(const HubSolution& solution, const ModelInputs& inputs, double tolerance = 1e-6);

/// Decodes design, dispatch and schedule from the column values, computes
/// the costs and runs validate_solution. Throws ValidationFailure naming the
/// violated families.
HubSolution extract_solution(const SolveOutcome& outcome, const IndexMaps& maps, const ModelInputs& inputs);

/// Decoding only; no validation.
HubSolution decode_solution(const SolveOutcome& outcome, const IndexMaps& maps, const ModelInputs& inputs);

CostBreakdown compute_costs(const HubSolution& solution, const ModelInputs& inputs);

EnergyBalance compute_energy_balance(const HubSolution& solution, const ModelInputs& inputs);

/// Largest |C^el - max(dt*buy*P^g, dt*sell*P^g)| over all slots.
double price_relaxation_deviation(const HubSolution& solution, const ModelInputs& inputs);

/// Charger label used in reports: charger type id and 1-based ordinal.
std::string charger_label(const TechnologyCatalog& catalog, int candidate);

/// Writes grid_power.csv, charging_power.csv, soc.csv, schedule.csv and
/// summary.json into `directory`. Throws IoError on write failures and
/// ValidationFailure if a grid value leaves its limits.
void render_reports(const HubSolution& solution, const EnergyBalance& balance, const ModelInputs& inputs,
                    const std::filesystem::path& directory);

}  // namespace ceh
