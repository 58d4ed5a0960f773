#include "ceh/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "ceh/catalog.hpp"
#include "ceh/errors.hpp"
#include "ceh/io.hpp"

namespace ceh {

namespace {

using ojson = nlohmann::ordered_json;

std::size_t at(int i) { return static_cast<std::size_t>(i); }

int round_int(double v) { return static_cast<int>(std::lround(v)); }

class Checker {
public:
    Checker(std::vector<Violation>& out, double tolerance) : out_(out), tol_(tolerance) {}

    void equal(ConstraintFamily family, double lhs, double rhs, double scale, const std::string& where) {
        const double diff = std::abs(lhs - rhs);
        if (diff > limit(scale)) out_.push_back({family, where, diff});
    }
    void at_most(ConstraintFamily family, double lhs, double rhs, double scale, const std::string& where) {
        if (lhs - rhs > limit(scale)) out_.push_back({family, where, lhs - rhs});
    }
    void fail(ConstraintFamily family, const std::string& where, double amount = 1.0) { out_.push_back({family, where, amount}); }

private:
    double limit(double scale) const { return tol_ * std::max(1.0, std::abs(scale)); }

    std::vector<Violation>& out_;
    double tol_;
};

}  // namespace

CostBreakdown::Shares CostBreakdown::shares() const {
    Shares s;
    if (total == 0.0) return s;
    s.capex = capex_annualized / total;
    s.opex_grid = opex_grid / total;
    s.opex_maintenance = opex_maintenance / total;
    s.degradation = degradation / total;
    return s;
}

std::string Violation::message() const { return fmt::format("{} at {}: off by {:.6g}", to_string(family), where, amount); }

std::string charger_label(const TechnologyCatalog& catalog, int candidate) {
    const auto cand = catalog.candidate_chargers().at(at(candidate));
    return fmt::format("{}#{}", catalog.chargers.at(at(cand.type)).id, cand.ordinal + 1);
}

HubSolution decode_solution(const SolveOutcome& outcome, const IndexMaps& maps, const ModelInputs& inputs) {
    if (!outcome.has_solution) throw ValidationFailure("ValidationFailure: the solve produced no solution to extract");
    if (outcome.values.size() != maps.size()) {
        throw ValidationFailure(fmt::format("ValidationFailure: {} values for {} columns", outcome.values.size(), maps.size()));
    }
    const auto& catalog = inputs.catalog;
    const auto& scenarios = inputs.scenarios.scenarios;
    const auto candidates = catalog.candidate_chargers();
    const std::size_t nb = catalog.bess.size();
    const std::size_t nc = candidates.size();

    HubSolution sol;
    sol.status = outcome.status;
    sol.objective = outcome.objective;
    sol.design.pv_units.assign(catalog.pv.size(), 0);
    sol.design.wt_units.assign(catalog.wt.size(), 0);
    sol.design.bess_units.assign(nb, 0);
    sol.design.chargers.assign(nc, 0);
    for (const auto& scenario : scenarios) {
        const auto slots = at(scenario.slot_count());
        ScenarioOperation op;
        op.scenario_id = scenario.id;
        op.pv_kw.assign(slots, 0.0);
        op.wt_kw.assign(slots, 0.0);
        op.grid_kw.assign(slots, 0.0);
        op.grid_cost.assign(slots, 0.0);
        op.charge_kw.assign(nb, std::vector<double>(slots, 0.0));
        op.discharge_kw.assign(nb, std::vector<double>(slots, 0.0));
        op.soc_kwh.assign(nb, std::vector<double>(slots + 1, 0.0));
        op.mode.assign(nb, std::vector<int>(slots, 0));
        op.charger_kw.assign(nc, std::vector<double>(slots, 0.0));
        sol.operations.push_back(std::move(op));
    }

    struct Start {
        int s, v, c, tr;
    };
    std::vector<Start> starts;
    for (std::size_t j = 0; j < maps.size(); ++j) {
        const auto& key = maps.key(static_cast<int>(j));
        const auto& i = key.idx;
        const double v = outcome.values[j];
        switch (key.kind) {
            case VarKind::PvUnits: sol.design.pv_units[at(i.p)] = round_int(v); break;
            case VarKind::WtUnits: sol.design.wt_units[at(i.w)] = round_int(v); break;
            case VarKind::BessUnits: sol.design.bess_units[at(i.b)] = round_int(v); break;
            case VarKind::ChargerSelected: sol.design.chargers[at(i.c)] = round_int(v); break;
            case VarKind::ChargeStart:
                if (v > 0.5) starts.push_back({i.s, i.v, i.c, i.tr});
                break;
            case VarKind::BessMode: {
                auto& op = sol.operations[at(i.s)];
                if (i.b < 0) {
                    for (auto& m : op.mode) m[at(i.t)] = round_int(v);
                } else {
                    op.mode[at(i.b)][at(i.t)] = round_int(v);
                }
                break;
            }
            case VarKind::BessCharge: sol.operations[at(i.s)].charge_kw[at(i.b)][at(i.t)] = v; break;
            case VarKind::BessDischarge: sol.operations[at(i.s)].discharge_kw[at(i.b)][at(i.t)] = v; break;
            case VarKind::GridPower: sol.operations[at(i.s)].grid_kw[at(i.t)] = v; break;
            case VarKind::SocEnergy: sol.operations[at(i.s)].soc_kwh[at(i.b)][at(i.t)] = v; break;
            case VarKind::GridCost: sol.operations[at(i.s)].grid_cost[at(i.t)] = v; break;
            case VarKind::ChargerPower: sol.operations[at(i.s)].charger_kw[at(i.c)][at(i.t)] = v; break;
        }
    }

    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const auto& scenario = scenarios[s];
        auto& op = sol.operations[s];
        for (int t = 0; t < scenario.slot_count(); ++t) {
            for (std::size_t p = 0; p < catalog.pv.size(); ++p) {
                op.pv_kw[at(t)] += sol.design.pv_units[p] * catalog::pv_unit_power(catalog.pv[p], scenario.irradiance_kw_m2[at(t)]);
            }
            for (std::size_t w = 0; w < catalog.wt.size(); ++w) {
                op.wt_kw[at(t)] += sol.design.wt_units[w] * catalog::wt_unit_power_from_measured(catalog.wt[w], scenario.wind_speed_m_s[at(t)]);
            }
        }
    }
    for (const auto& st : starts) {
        const auto& scenario = scenarios[at(st.s)];
        const auto& session = scenario.sessions[at(st.v)];
        const auto& type = catalog.chargers[at(candidates[at(st.c)].type)];
        SessionAssignment a;
        a.vehicle = st.v;
        a.vehicle_id = session.vehicle_id;
        a.candidate = st.c;
        a.charger_id = charger_label(catalog, st.c);
        a.start_slot = session.arrival_slot + st.tr;
        a.duration_slots = catalog::charging_duration_slots(session, type, scenario.delta_t_hours);
        a.power_kw = catalog::effective_rate(session, type);
        sol.operations[at(st.s)].sessions.push_back(std::move(a));
    }
    for (auto& op : sol.operations) {
        std::stable_sort(op.sessions.begin(), op.sessions.end(), [](const SessionAssignment& a, const SessionAssignment& b) {
            return std::tie(a.vehicle, a.start_slot, a.candidate) < std::tie(b.vehicle, b.start_slot, b.candidate);
        });
    }
    sol.costs = compute_costs(sol, inputs);
    return sol;
}

std::vector<Violation> validate_solution(const HubSolution& solution, const ModelInputs& inputs, double tolerance) {
    using F = ConstraintFamily;
    std::vector<Violation> out;
    Checker check(out, tolerance);
    const auto& catalog = inputs.catalog;
    const auto& options = inputs.options;
    const auto& design = solution.design;
    const auto candidates = catalog.candidate_chargers();
    const int nc = static_cast<int>(candidates.size());

    if (design.pv_units.size() != catalog.pv.size() || design.wt_units.size() != catalog.wt.size() ||
        design.bess_units.size() != catalog.bess.size() || design.chargers.size() != candidates.size() ||
        solution.operations.size() != inputs.scenarios.scenarios.size()) {
        throw ValidationFailure("ValidationFailure: solution shape does not match the inputs");
    }

    for (std::size_t p = 0; p < catalog.pv.size(); ++p) {
        if (design.pv_units[p] < 0 || design.pv_units[p] > catalog.pv[p].max_units) check.fail(F::PvLink, fmt::format("pv '{}' unit count", catalog.pv[p].id));
    }
    for (std::size_t w = 0; w < catalog.wt.size(); ++w) {
        if (design.wt_units[w] < 0 || design.wt_units[w] > catalog.wt[w].max_units) check.fail(F::WtLink, fmt::format("wt '{}' unit count", catalog.wt[w].id));
    }
    for (std::size_t b = 0; b < catalog.bess.size(); ++b) {
        if (design.bess_units[b] < 0 || design.bess_units[b] > catalog.bess[b].max_units) {
            check.fail(F::BessPowerCaps, fmt::format("bess '{}' unit count", catalog.bess[b].id));
        }
    }
    for (int c = 0; c < nc; ++c) {
        if (design.chargers[at(c)] != 0 && design.chargers[at(c)] != 1) check.fail(F::ChargerLinking, fmt::format("charger {} selection", charger_label(catalog, c)));
    }
    if (options.symmetry_breaking) {
        for (int c = 1; c < nc; ++c) {
            if (candidates[at(c)].type != candidates[at(c - 1)].type) continue;
            if (design.chargers[at(c)] > design.chargers[at(c - 1)]) {
                check.fail(F::SymmetryInstall, fmt::format("charger {} installed before {}", charger_label(catalog, c), charger_label(catalog, c - 1)));
            }
        }
    }

    for (std::size_t s = 0; s < inputs.scenarios.scenarios.size(); ++s) {
        const auto& scenario = inputs.scenarios.scenarios[s];
        const auto& op = solution.operations[s];
        const int slots = scenario.slot_count();
        const double dt = scenario.delta_t_hours;
        auto slot_at = [&](int t) { return fmt::format("scenario '{}' slot {}", scenario.id, t + 1); };

        // PV, wind, grid, prices
        for (int t = 0; t < slots; ++t) {
            double pv = 0.0;
            for (std::size_t p = 0; p < catalog.pv.size(); ++p) pv += design.pv_units[p] * catalog::pv_unit_power(catalog.pv[p], scenario.irradiance_kw_m2[at(t)]);
            check.equal(F::PvLink, op.pv_kw[at(t)], pv, pv, slot_at(t));
            double wt = 0.0;
            for (std::size_t w = 0; w < catalog.wt.size(); ++w) {
                wt += design.wt_units[w] * catalog::wt_unit_power_from_measured(catalog.wt[w], scenario.wind_speed_m_s[at(t)]);
            }
            check.equal(F::WtLink, op.wt_kw[at(t)], wt, wt, slot_at(t));

            const double g = op.grid_kw[at(t)];
            const double wdl = scenario.grid.withdrawal_limit_kw[at(t)];
            const double inj = scenario.grid.injection_limit_kw[at(t)];
            check.at_most(F::GridBounds, g, wdl, wdl, slot_at(t));
            check.at_most(F::GridBounds, -g, inj, inj, slot_at(t));
            const double buy = dt * scenario.grid.buy_price[at(t)] * g;
            const double sell = dt * scenario.grid.sell_price[at(t)] * g;
            const double cost = op.grid_cost[at(t)];
            check.at_most(F::PriceRelaxation, buy, cost, std::max(std::abs(buy), std::abs(cost)), slot_at(t));
            check.at_most(F::PriceRelaxation, sell, cost, std::max(std::abs(sell), std::abs(cost)), slot_at(t));
        }

        // storage
        for (std::size_t b = 0; b < catalog.bess.size(); ++b) {
            const auto& tech = catalog.bess[b];
            const double n = design.bess_units[b];
            const auto& ch = op.charge_kw[b];
            const auto& dis = op.discharge_kw[b];
            const auto& soc = op.soc_kwh[b];
            auto where = [&](int t) { return fmt::format("scenario '{}' bess '{}' slot {}", scenario.id, tech.id, t + 1); };
            const double initial = n * tech.unit_size_kwh * tech.soc_init_frac;
            check.equal(F::InitialSoc, soc[0], initial, initial, where(0));
            for (int t = 0; t <= slots; ++t) {
                const double hi = n * tech.unit_size_kwh * tech.soc_max_frac;
                const double lo = n * tech.unit_size_kwh * tech.soc_min_frac;
                check.at_most(F::SocBounds, soc[at(t)], hi, hi, where(t));
                check.at_most(F::SocBounds, lo, soc[at(t)], hi, where(t));
            }
            const double big_charge = tech.max_units * tech.max_charge_kw;
            const double big_discharge = tech.max_units * tech.max_discharge_kw;
            for (int t = 0; t < slots; ++t) {
                const double next = soc[at(t)] + tech.charge_eff * ch[at(t)] * dt - dis[at(t)] * dt / tech.discharge_eff -
                                    tech.self_discharge_per_h * tech.unit_size_kwh * n * dt;
                check.equal(F::SocRecursion, soc[at(t + 1)], next, std::max(soc[at(t)], soc[at(t + 1)]), where(t));
                check.at_most(F::BessPowerCaps, ch[at(t)], n * tech.max_charge_kw, n * tech.max_charge_kw, where(t));
                check.at_most(F::BessPowerCaps, dis[at(t)], n * tech.max_discharge_kw, n * tech.max_discharge_kw, where(t));
                check.at_most(F::BessPowerCaps, -ch[at(t)], 0.0, ch[at(t)], where(t));
                check.at_most(F::BessPowerCaps, -dis[at(t)], 0.0, dis[at(t)], where(t));
                const int mode = op.mode[b][at(t)];
                if (mode != 0 && mode != 1) {
                    check.fail(F::BessExclusivity, where(t));
                    continue;
                }
                check.at_most(F::BessExclusivity, ch[at(t)], big_charge * mode, big_charge, where(t));
                check.at_most(F::BessExclusivity, dis[at(t)], big_discharge * (1 - mode), big_discharge, where(t));
                if (!options.per_technology_bess_mode && b > 0 && op.mode[0][at(t)] != mode) check.fail(F::BessExclusivity, where(t));
            }
        }

        // sessions
        const auto nv = scenario.sessions.size();
        std::vector<int> count(nv, 0);
        std::vector<std::vector<std::vector<int>>> occupants(at(nc), std::vector<std::vector<int>>(at(slots)));
        std::vector<std::vector<double>> load(at(nc), std::vector<double>(at(slots), 0.0));
        for (const auto& a : op.sessions) {
            if (a.vehicle < 0 || at(a.vehicle) >= nv || a.candidate < 0 || a.candidate >= nc) {
                check.fail(F::ExactlyOneStart, fmt::format("scenario '{}' assignment of '{}'", scenario.id, a.vehicle_id));
                continue;
            }
            const auto& session = scenario.sessions[at(a.vehicle)];
            const auto& type = catalog.chargers[at(candidates[at(a.candidate)].type)];
            const auto where = fmt::format("scenario '{}' vehicle '{}' charger {}", scenario.id, session.vehicle_id, charger_label(catalog, a.candidate));
            ++count[at(a.vehicle)];
            if (design.chargers[at(a.candidate)] != 1) check.fail(F::ChargerLinking, where);
            const int tau = catalog::charging_duration_slots(session, type, dt);
            const double rate = catalog::effective_rate(session, type);
            if (a.duration_slots != tau) check.fail(F::ChargerPower, where + " duration", std::abs(a.duration_slots - tau));
            check.equal(F::ChargerPower, a.power_kw, rate, rate, where + " rate");
            const int last = a.start_slot + tau - 1;
            if (a.start_slot < session.arrival_slot || last > session.departure_slot) {
                check.fail(F::ExactlyOneStart, where + fmt::format(" start {} outside {}..{}", a.start_slot, session.arrival_slot, session.departure_slot));
            }
            for (int t = a.start_slot - 1; t < last && t < slots; ++t) {
                if (t < 0) continue;
                occupants[at(a.candidate)][at(t)].push_back(a.vehicle);
                load[at(a.candidate)][at(t)] += rate;
            }
        }
        for (std::size_t v = 0; v < nv; ++v) {
            if (count[v] != 1) {
                check.fail(F::ExactlyOneStart, fmt::format("scenario '{}' vehicle '{}' scheduled {} times", scenario.id, scenario.sessions[v].vehicle_id, count[v]),
                           std::abs(count[v] - 1));
            }
        }
        for (int c = 0; c < nc; ++c) {
            const double max_power = catalog.chargers[at(candidates[at(c)].type)].max_power_kw;
            for (int t = 0; t < slots; ++t) {
                const auto where = fmt::format("scenario '{}' charger {} slot {}", scenario.id, charger_label(catalog, c), t + 1);
                const auto& here = occupants[at(c)][at(t)];
                if (here.size() > 1) check.fail(F::Occupancy, where, static_cast<double>(here.size() - 1));
                const double p = op.charger_kw[at(c)][at(t)];
                check.equal(F::ChargerPower, p, load[at(c)][at(t)], load[at(c)][at(t)], where);
                check.at_most(F::ChargerPower, p, max_power, max_power, where);
                check.at_most(F::ChargerPower, -p, 0.0, p, where);
            }
        }
        if (options.symmetry_breaking) {
            for (const auto& a : op.sessions) {
                if (a.candidate <= 0 || a.candidate >= nc) continue;
                if (candidates[at(a.candidate)].type != candidates[at(a.candidate - 1)].type) continue;
                const int t = a.start_slot - 1;
                if (t < 0 || t >= slots) continue;
                const auto& below = occupants[at(a.candidate - 1)][at(t)];
                const bool other = std::any_of(below.begin(), below.end(), [&](int v) { return v != a.vehicle; });
                if (!other) {
                    check.fail(F::SymmetryUsage, fmt::format("scenario '{}' vehicle '{}' starts on {} while {} is free", scenario.id, a.vehicle_id,
                                                            charger_label(catalog, a.candidate), charger_label(catalog, a.candidate - 1)));
                }
            }
        }

        // balance
        for (int t = 0; t < slots; ++t) {
            double supply = op.pv_kw[at(t)] + op.wt_kw[at(t)] + op.grid_kw[at(t)];
            double demand = 0.0;
            double scale = std::max({std::abs(op.pv_kw[at(t)]), std::abs(op.wt_kw[at(t)]), std::abs(op.grid_kw[at(t)])});
            for (std::size_t b = 0; b < catalog.bess.size(); ++b) {
                supply += op.discharge_kw[b][at(t)];
                demand += op.charge_kw[b][at(t)];
                scale = std::max({scale, op.discharge_kw[b][at(t)], op.charge_kw[b][at(t)]});
            }
            for (int c = 0; c < nc; ++c) demand += op.charger_kw[at(c)][at(t)];
            scale = std::max(scale, demand);
            check.equal(F::PowerBalance, supply, demand, scale, slot_at(t));
        }
    }
    return out;
}

HubSolution extract_solution(const SolveOutcome& outcome, const IndexMaps& maps, const ModelInputs& inputs) {
    auto sol = decode_solution(outcome, maps, inputs);
    const auto violations = validate_solution(sol, inputs);
    if (!violations.empty()) {
        std::string text = fmt::format("ValidationFailure: {} violated constraint(s)", violations.size());
        for (std::size_t i = 0; i < violations.size() && i < 5; ++i) text += "; " + violations[i].message();
        throw ValidationFailure(text);
    }
    return sol;
}

CostBreakdown compute_costs(const HubSolution& solution, const ModelInputs& inputs) {
    const auto& catalog = inputs.catalog;
    const double r = inputs.economics.discount_rate;
    CostBreakdown k;
    auto add_asset = [&](double units, double invest, double maintenance, double lifetime) {
        k.capex_annualized += units * catalog::capital_recovery_factor(r, lifetime) * invest;
        k.opex_maintenance += units * maintenance;
    };
    for (std::size_t p = 0; p < catalog.pv.size(); ++p) {
        add_asset(solution.design.pv_units[p], catalog.pv[p].invest_cost, catalog.pv[p].maintenance_cost, catalog.pv[p].lifetime_years);
    }
    for (std::size_t w = 0; w < catalog.wt.size(); ++w) {
        add_asset(solution.design.wt_units[w], catalog.wt[w].invest_cost, catalog.wt[w].maintenance_cost, catalog.wt[w].lifetime_years);
    }
    for (std::size_t b = 0; b < catalog.bess.size(); ++b) {
        add_asset(solution.design.bess_units[b], catalog.bess[b].invest_cost, catalog.bess[b].maintenance_cost, catalog.bess[b].lifetime_years);
    }
    const auto candidates = catalog.candidate_chargers();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const auto& type = catalog.chargers[at(candidates[c].type)];
        add_asset(solution.design.chargers[c], type.invest_cost, type.maintenance_cost, type.lifetime_years);
    }
    for (std::size_t s = 0; s < solution.operations.size(); ++s) {
        const auto& op = solution.operations[s];
        const double days = inputs.scenarios.scenarios[s].occurrence_days;
        for (double c : op.grid_cost) k.opex_grid += days * c;
        for (std::size_t b = 0; b < catalog.bess.size(); ++b) {
            double throughput = 0.0;
            for (std::size_t t = 0; t < op.charge_kw[b].size(); ++t) throughput += op.charge_kw[b][t] + op.discharge_kw[b][t];
            k.degradation += days * catalog.bess[b].degradation_cost_per_kw * throughput;
        }
    }
    k.total = k.capex_annualized + k.opex_grid + k.opex_maintenance + k.degradation;
    return k;
}

EnergyBalance compute_energy_balance(const HubSolution& solution, const ModelInputs& inputs) {
    const auto& catalog = inputs.catalog;
    EnergyBalance e;
    for (std::size_t s = 0; s < solution.operations.size(); ++s) {
        const auto& scenario = inputs.scenarios.scenarios[s];
        const auto& op = solution.operations[s];
        const double w = scenario.occurrence_days * scenario.delta_t_hours;
        for (int t = 0; t < scenario.slot_count(); ++t) {
            e.pv += w * op.pv_kw[at(t)];
            e.wt += w * op.wt_kw[at(t)];
            e.grid_import += w * std::max(0.0, op.grid_kw[at(t)]);
            e.grid_export += w * std::max(0.0, -op.grid_kw[at(t)]);
            for (const auto& series : op.charger_kw) e.ev_demand += w * series[at(t)];
        }
        for (std::size_t b = 0; b < catalog.bess.size(); ++b) {
            const auto& tech = catalog.bess[b];
            for (int t = 0; t < scenario.slot_count(); ++t) {
                e.battery_conversion_loss += w * ((1.0 - tech.charge_eff) * op.charge_kw[b][at(t)] +
                                                  (1.0 / tech.discharge_eff - 1.0) * op.discharge_kw[b][at(t)]);
                e.battery_self_discharge += w * tech.self_discharge_per_h * tech.unit_size_kwh * solution.design.bess_units[b];
            }
            e.storage_change += scenario.occurrence_days * (op.soc_kwh[b].back() - op.soc_kwh[b].front());
        }
    }
    return e;
}

double price_relaxation_deviation(const HubSolution& solution, const ModelInputs& inputs) {
    double worst = 0.0;
    for (std::size_t s = 0; s < solution.operations.size(); ++s) {
        const auto& scenario = inputs.scenarios.scenarios[s];
        const auto& op = solution.operations[s];
        for (int t = 0; t < scenario.slot_count(); ++t) {
            const double g = op.grid_kw[at(t)];
            const double envelope = std::max(scenario.delta_t_hours * scenario.grid.buy_price[at(t)] * g,
                                             scenario.delta_t_hours * scenario.grid.sell_price[at(t)] * g);
            worst = std::max(worst, std::abs(op.grid_cost[at(t)] - envelope));
        }
    }
    return worst;
}

void render_reports(const HubSolution& solution, const EnergyBalance& balance, const ModelInputs& inputs,
                    const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw IoError(fmt::format("IoError: cannot create '{}': {}", directory.string(), ec.message()));
    const auto& catalog = inputs.catalog;
    const auto& scenarios = inputs.scenarios.scenarios;

    std::string grid = "scenario_id,slot,grid_kw,withdrawal_limit_kw,injection_limit_kw\n";
    std::string charging = "scenario_id,slot,charging_kw\n";
    std::string soc = "scenario_id,bess_id,slot,soc_kwh\n";
    std::string schedule = "vehicle_id,scenario_id,charger_id,start_slot,duration_slots,power_kw\n";
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const auto& scenario = scenarios[s];
        const auto& op = solution.operations[s];
        for (int t = 0; t < scenario.slot_count(); ++t) {
            const double g = op.grid_kw[at(t)];
            const double wdl = scenario.grid.withdrawal_limit_kw[at(t)];
            const double inj = scenario.grid.injection_limit_kw[at(t)];
            const double tol = 1e-6 * std::max(1.0, std::max(wdl, inj));
            if (g > wdl + tol || -g > inj + tol) {
                throw ValidationFailure(fmt::format("ValidationFailure: grid_bounds at scenario '{}' slot {}: {} kW outside [-{}, {}]",
                                                    scenario.id, t + 1, g, inj, wdl));
            }
            grid += fmt::format("{},{},{},{},{}\n", scenario.id, t + 1, g, wdl, inj);
            double total = 0.0;
            for (const auto& series : op.charger_kw) total += series[at(t)];
            charging += fmt::format("{},{},{}\n", scenario.id, t + 1, total);
        }
        for (std::size_t b = 0; b < catalog.bess.size(); ++b) {
            for (std::size_t t = 0; t < op.soc_kwh[b].size(); ++t) soc += fmt::format("{},{},{},{}\n", scenario.id, catalog.bess[b].id, t + 1, op.soc_kwh[b][t]);
        }
        for (const auto& a : op.sessions) {
            schedule += fmt::format("{},{},{},{},{},{}\n", a.vehicle_id, scenario.id, a.charger_id, a.start_slot, a.duration_slots, a.power_kw);
        }
    }

    ojson summary;
    summary["status"] = std::string(to_string(solution.status));
    summary["objective"] = solution.objective;
    ojson design;
    auto units = [](const auto& techs, const std::vector<int>& counts) {
        ojson arr = ojson::array();
        for (std::size_t i = 0; i < techs.size(); ++i) arr.push_back({{"id", techs[i].id}, {"units", counts[i]}});
        return arr;
    };
    design["pv"] = units(catalog.pv, solution.design.pv_units);
    design["wt"] = units(catalog.wt, solution.design.wt_units);
    design["bess"] = units(catalog.bess, solution.design.bess_units);
    ojson chargers = ojson::array();
    for (std::size_t c = 0; c < solution.design.chargers.size(); ++c) {
        chargers.push_back({{"id", charger_label(catalog, static_cast<int>(c))}, {"selected", solution.design.chargers[c]}});
    }
    design["chargers"] = chargers;
    summary["design"] = design;
    const auto& k = solution.costs;
    const auto shares = k.shares();
    summary["costs"] = {{"capex_annualized", k.capex_annualized}, {"opex_grid", k.opex_grid},
                        {"opex_maintenance", k.opex_maintenance}, {"degradation", k.degradation}, {"total", k.total},
                        {"shares", {{"capex", shares.capex}, {"opex_grid", shares.opex_grid},
                                    {"opex_maintenance", shares.opex_maintenance}, {"degradation", shares.degradation}}}};
    const double produced = balance.production();
    const double consumed = balance.consumption();
    auto share = [](double part, double whole) { return whole == 0.0 ? 0.0 : part / whole; };
    summary["energy_kwh"] = {
        {"production", {{"pv", balance.pv}, {"wt", balance.wt}, {"grid_import", balance.grid_import}, {"total", produced}}},
        {"consumption", {{"ev_demand", balance.ev_demand}, {"grid_export", balance.grid_export},
                         {"battery_conversion_loss", balance.battery_conversion_loss},
                         {"battery_self_discharge", balance.battery_self_discharge},
                         {"storage_change", balance.storage_change}, {"total", consumed}}},
        {"production_shares", {{"pv", share(balance.pv, produced)}, {"wt", share(balance.wt, produced)},
                               {"grid_import", share(balance.grid_import, produced)}}},
        {"consumption_shares", {{"ev_demand", share(balance.ev_demand, consumed)},
                                {"grid_export", share(balance.grid_export, consumed)},
                                {"battery_losses", share(balance.battery_losses(), consumed)},
                                {"storage_change", share(balance.storage_change, consumed)}}}};

    write_text_atomically(directory / "grid_power.csv", grid);
    write_text_atomically(directory / "charging_power.csv", charging);
    write_text_atomically(directory / "soc.csv", soc);
    write_text_atomically(directory / "schedule.csv", schedule);
    write_text_atomically(directory / "summary.json", summary.dump(2) + "\n");
}

}  // namespace ceh
