#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "oracles.hpp"

namespace cehtest {

using ceh::ConstraintFamily;
using ceh::HubSolution;
using ceh::ModelInputs;

namespace {

std::size_t at(int i) { return static_cast<std::size_t>(i); }

std::vector<int> candidate_types(const ceh::TechnologyCatalog& cat) {
    std::vector<int> out;
    for (std::size_t l = 0; l < cat.chargers.size(); ++l)
        for (int j = 0; j < cat.chargers[l].candidate_count; ++j) out.push_back(static_cast<int>(l));
    return out;
}

// Signed step that moves a SOC value toward the middle of its band, so the
// nudge stays inside the bounds.
double toward_middle(double value, double lo, double hi, double step) { return value < 0.5 * (lo + hi) ? step : -step; }

}  // namespace

double turbine_power(const ceh::WtTechnology& tech, double measured_m_s) {
    const double v = measured_m_s * std::pow(tech.hub_height_m / tech.measurement_height_m, tech.shear_exponent);
    if (v < tech.cut_in_m_s || v > tech.cut_out_m_s) return 0.0;
    if (v >= tech.rated_speed_m_s) return tech.rated_power_kw;
    const double ratio = v / tech.rated_speed_m_s;
    return tech.rated_power_kw * ratio * ratio * ratio;
}

std::vector<std::string> feasibility_failures(const HubSolution& sol, const ModelInputs& in) {
    std::vector<std::string> fails;
    const auto& cat = in.catalog;
    const auto types = candidate_types(cat);
    for (std::size_t s = 0; s < in.scenarios.scenarios.size(); ++s) {
        const auto& sc = in.scenarios.scenarios[s];
        const auto& op = sol.operations[s];
        const int T = sc.slot_count();
        const double dt = sc.delta_t_hours;

        for (int t = 0; t < T; ++t) {
            const double g = op.grid_kw[at(t)];
            const double wdl = sc.grid.withdrawal_limit_kw[at(t)];
            const double inj = sc.grid.injection_limit_kw[at(t)];
            if (g > wdl + 1e-6 * std::max(1.0, wdl) || -g > inj + 1e-6 * std::max(1.0, inj)) {
                fails.push_back(fmt::format("{} slot {}: grid {} outside [-{}, {}]", sc.id, t + 1, g, inj, wdl));
            }
        }

        for (std::size_t b = 0; b < cat.bess.size(); ++b) {
            const auto& tech = cat.bess[b];
            const double cap = sol.design.bess_units[b] * tech.unit_size_kwh;
            const double lo = cap * tech.soc_min_frac;
            const double hi = cap * tech.soc_max_frac;
            const double tol = 1e-6 * std::max(1.0, hi);
            for (std::size_t t = 0; t < op.soc_kwh[b].size(); ++t) {
                const double e = op.soc_kwh[b][t];
                if (e < lo - tol || e > hi + tol) fails.push_back(fmt::format("{} bess {} state {}: {} outside [{}, {}]", sc.id, tech.id, t, e, lo, hi));
            }
        }

        std::vector<int> scheduled(sc.sessions.size(), 0);
        std::map<std::pair<int, int>, int> booked;  // (candidate, slot) -> sessions
        std::vector<double> load(at(T), 0.0);
        for (const auto& a : op.sessions) {
            if (a.vehicle < 0 || at(a.vehicle) >= sc.sessions.size() || a.candidate < 0 || at(a.candidate) >= types.size()) {
                fails.push_back(fmt::format("{}: assignment with bad indices", sc.id));
                continue;
            }
            ++scheduled[at(a.vehicle)];
            const auto& ev = sc.sessions[at(a.vehicle)];
            const auto& type = cat.chargers[at(types[at(a.candidate)])];
            const double rate = std::min(ev.max_vehicle_rate_kw, type.max_power_kw);
            const int tau = tau_by_search(ev.energy_kwh, rate, dt);
            if (a.start_slot < ev.arrival_slot || a.start_slot + tau - 1 > ev.departure_slot) {
                fails.push_back(fmt::format("{} {}: slots {}..{} leave window {}..{}", sc.id, ev.vehicle_id, a.start_slot,
                                            a.start_slot + tau - 1, ev.arrival_slot, ev.departure_slot));
            }
            for (int t = a.start_slot; t < a.start_slot + tau && t <= T; ++t) {
                if (++booked[{a.candidate, t}] > 1) fails.push_back(fmt::format("{} charger {} slot {} double-booked", sc.id, a.candidate, t));
                load[at(t - 1)] += rate;
            }
        }
        for (std::size_t v = 0; v < scheduled.size(); ++v) {
            if (scheduled[v] != 1) fails.push_back(fmt::format("{} {} scheduled {} times", sc.id, sc.sessions[v].vehicle_id, scheduled[v]));
        }

        double biggest = 1.0;
        std::vector<double> residual(at(T), 0.0);
        for (int t = 0; t < T; ++t) {
            double supply = op.grid_kw[at(t)];
            double use = load[at(t)];
            for (std::size_t p = 0; p < cat.pv.size(); ++p) {
                supply += sol.design.pv_units[p] * cat.pv[p].efficiency * cat.pv[p].area_m2 * sc.irradiance_kw_m2[at(t)];
            }
            for (std::size_t w = 0; w < cat.wt.size(); ++w) supply += sol.design.wt_units[w] * turbine_power(cat.wt[w], sc.wind_speed_m_s[at(t)]);
            for (std::size_t b = 0; b < cat.bess.size(); ++b) {
                supply += op.discharge_kw[b][at(t)];
                use += op.charge_kw[b][at(t)];
            }
            biggest = std::max(biggest, use);
            residual[at(t)] = supply - use;
        }
        for (int t = 0; t < T; ++t) {
            if (std::abs(residual[at(t)]) > 1e-6 * biggest) fails.push_back(fmt::format("{} slot {}: balance residual {}", sc.id, t + 1, residual[at(t)]));
        }
    }
    return fails;
}

double relaxation_gap(const HubSolution& sol, const ModelInputs& in) {
    double worst = 0.0;
    for (std::size_t s = 0; s < in.scenarios.scenarios.size(); ++s) {
        const auto& sc = in.scenarios.scenarios[s];
        for (std::size_t t = 0; t < static_cast<std::size_t>(sc.slot_count()); ++t) {
            const double g = sol.operations[s].grid_kw[t];
            const double buy = sc.delta_t_hours * sc.grid.buy_price[t] * g;
            const double sell = sc.delta_t_hours * sc.grid.sell_price[t] * g;
            worst = std::max(worst, std::abs(sol.operations[s].grid_cost[t] - std::max(buy, sell)));
        }
    }
    return worst;
}

std::vector<Mutation> family_mutations() {
    std::vector<Mutation> m;
    m.push_back({ConstraintFamily::PvLink, "pv output raised by 25 kW", [](HubSolution& s, const ModelInputs&) {
                     s.operations[0].pv_kw[0] += 25.0;
                     return true;
                 }});
    m.push_back({ConstraintFamily::WtLink, "wind output raised by 25 kW", [](HubSolution& s, const ModelInputs&) {
                     s.operations[0].wt_kw[0] += 25.0;
                     return true;
                 }});
    m.push_back({ConstraintFamily::SocRecursion, "end-of-day SOC nudged by 3 kWh", [](HubSolution& s, const ModelInputs& in) {
                     if (in.catalog.bess.empty() || s.design.bess_units[0] == 0) return false;
                     const auto& tech = in.catalog.bess[0];
                     const double cap = s.design.bess_units[0] * tech.unit_size_kwh;
                     auto& e = s.operations[0].soc_kwh[0].back();
                     e += toward_middle(e, cap * tech.soc_min_frac, cap * tech.soc_max_frac, 3.0);
                     return true;
                 }});
    m.push_back({ConstraintFamily::SocBounds, "SOC pushed 10 kWh above the band", [](HubSolution& s, const ModelInputs& in) {
                     if (in.catalog.bess.empty()) return false;
                     const auto& tech = in.catalog.bess[0];
                     s.operations[0].soc_kwh[0].back() = s.design.bess_units[0] * tech.unit_size_kwh * tech.soc_max_frac + 10.0;
                     return true;
                 }});
    m.push_back({ConstraintFamily::InitialSoc, "initial SOC nudged by 3 kWh", [](HubSolution& s, const ModelInputs& in) {
                     if (in.catalog.bess.empty() || s.design.bess_units[0] == 0) return false;
                     const auto& tech = in.catalog.bess[0];
                     const double cap = s.design.bess_units[0] * tech.unit_size_kwh;
                     auto& e = s.operations[0].soc_kwh[0].front();
                     e += toward_middle(e, cap * tech.soc_min_frac, cap * tech.soc_max_frac, 3.0);
                     return true;
                 }});
    m.push_back({ConstraintFamily::BessPowerCaps, "charging 10 kW beyond the installed rating", [](HubSolution& s, const ModelInputs& in) {
                     if (in.catalog.bess.empty()) return false;
                     const auto& tech = in.catalog.bess[0];
                     s.operations[0].charge_kw[0][0] = s.design.bess_units[0] * tech.max_charge_kw + 10.0;
                     return true;
                 }});
    m.push_back({ConstraintFamily::BessExclusivity, "mode flipped against the power flow", [](HubSolution& s, const ModelInputs& in) {
                     if (in.catalog.bess.empty()) return false;
                     for (auto& op : s.operations) {
                         for (std::size_t t = 0; t < op.mode[0].size(); ++t) {
                             const bool charging = op.charge_kw[0][t] > 1e-3;
                             const bool discharging = op.discharge_kw[0][t] > 1e-3;
                             if (!charging && !discharging) continue;
                             for (auto& mode : op.mode) mode[t] = charging ? 0 : 1;
                             return true;
                         }
                     }
                     for (auto& mode : s.operations[0].mode) mode[0] = 2;
                     return true;
                 }});
    m.push_back({ConstraintFamily::ChargerLinking, "used charger uninstalled", [](HubSolution& s, const ModelInputs&) {
                     for (auto& op : s.operations) {
                         if (op.sessions.empty()) continue;
                         s.design.chargers[at(op.sessions[0].candidate)] = 0;
                         return true;
                     }
                     return false;
                 }});
    m.push_back({ConstraintFamily::ExactlyOneStart, "a session dropped from the schedule", [](HubSolution& s, const ModelInputs&) {
                     for (auto& op : s.operations) {
                         if (op.sessions.empty()) continue;
                         op.sessions.erase(op.sessions.begin());
                         return true;
                     }
                     return false;
                 }});
    m.push_back({ConstraintFamily::Occupancy, "second session moved onto the first one's charger and slot", [](HubSolution& s, const ModelInputs& in) {
                     for (auto& op : s.operations) {
                         if (op.sessions.size() < 2) continue;
                         op.sessions[1].candidate = op.sessions[0].candidate;
                         op.sessions[1].charger_id = ceh::charger_label(in.catalog, op.sessions[0].candidate);
                         op.sessions[1].start_slot = op.sessions[0].start_slot;
                         return true;
                     }
                     for (auto& op : s.operations) {
                         if (op.sessions.empty()) continue;
                         op.sessions.push_back(op.sessions[0]);
                         return true;
                     }
                     return false;
                 }});
    m.push_back({ConstraintFamily::ChargerPower, "charger power raised by 7 kW", [](HubSolution& s, const ModelInputs&) {
                     if (s.operations[0].charger_kw.empty()) return false;
                     s.operations[0].charger_kw[0][0] += 7.0;
                     return true;
                 }});
    m.push_back({ConstraintFamily::SymmetryInstall, "later identical candidate installed first", [](HubSolution& s, const ModelInputs& in) {
                     const auto types = candidate_types(in.catalog);
                     for (std::size_t c = 1; c < types.size(); ++c) {
                         if (types[c] != types[c - 1]) continue;
                         s.design.chargers[c] = 1;
                         s.design.chargers[c - 1] = 0;
                         return true;
                     }
                     return false;
                 }});
    m.push_back({ConstraintFamily::SymmetryUsage, "session moved to the next identical charger while its own is free", [](HubSolution& s, const ModelInputs& in) {
                     const auto types = candidate_types(in.catalog);
                     for (std::size_t sc = 0; sc < s.operations.size(); ++sc) {
                         auto& op = s.operations[sc];
                         const auto& scenario = in.scenarios.scenarios[sc];
                         for (auto& a : op.sessions) {
                             const auto next = at(a.candidate + 1);
                             if (next >= types.size() || types[next] != types[at(a.candidate)]) continue;
                             // the vacated candidate must be free at the start slot
                             bool busy = false;
                             for (const auto& other : op.sessions) {
                                 if (&other == &a || other.candidate != a.candidate) continue;
                                 const auto& ev = scenario.sessions[at(other.vehicle)];
                                 const auto& type = in.catalog.chargers[at(types[at(other.candidate)])];
                                 const int tau = tau_by_search(ev.energy_kwh, std::min(ev.max_vehicle_rate_kw, type.max_power_kw),
                                                               scenario.delta_t_hours);
                                 if (other.start_slot <= a.start_slot && a.start_slot < other.start_slot + tau) busy = true;
                             }
                             if (busy) continue;
                             a.candidate += 1;
                             a.charger_id = ceh::charger_label(in.catalog, a.candidate);
                             s.design.chargers[next] = 1;
                             return true;
                         }
                     }
                     return false;
                 }});
    m.push_back({ConstraintFamily::GridBounds, "grid import 50 kW above the withdrawal limit", [](HubSolution& s, const ModelInputs& in) {
                     s.operations[0].grid_kw[0] = in.scenarios.scenarios[0].grid.withdrawal_limit_kw[0] + 50.0;
                     return true;
                 }});
    m.push_back({ConstraintFamily::PriceRelaxation, "trading cost lowered by 5 EUR", [](HubSolution& s, const ModelInputs&) {
                     s.operations[0].grid_cost[0] -= 5.0;
                     return true;
                 }});
    m.push_back({ConstraintFamily::PowerBalance, "1 kW extra import with its cost", [](HubSolution& s, const ModelInputs& in) {
                     const auto& sc = in.scenarios.scenarios[0];
                     auto& op = s.operations[0];
                     for (std::size_t t = 0; t < op.grid_kw.size(); ++t) {
                         if (op.grid_kw[t] + 1.0 > sc.grid.withdrawal_limit_kw[t]) continue;
                         op.grid_kw[t] += 1.0;
                         op.grid_cost[t] += sc.delta_t_hours * sc.grid.buy_price[t];
                         return true;
                     }
                     return false;
                 }});
    return m;
}

}  // namespace cehtest
