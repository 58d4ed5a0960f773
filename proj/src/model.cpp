#include "ceh/model.hpp"

#include <fmt/format.h>

#include "ceh/errors.hpp"

namespace ceh::model {

namespace {

VarIndex at_design(int p = -1, int w = -1, int b = -1, int c = -1) {
    VarIndex i;
    i.p = p;
    i.w = w;
    i.b = b;
    i.c = c;
    return i;
}

VarIndex at_slot(int t, int s) {
    VarIndex i;
    i.t = t;
    i.s = s;
    return i;
}

VarIndex at_bess(int b, int t, int s) {
    VarIndex i = at_slot(t, s);
    i.b = b;
    return i;
}

VarIndex at_charger(int c, int t, int s) {
    VarIndex i = at_slot(t, s);
    i.c = c;
    return i;
}

VarIndex at_start(int v, int c, int tr, int s) {
    VarIndex i;
    i.v = v;
    i.c = c;
    i.tr = tr;
    i.s = s;
    return i;
}

/// 0-based first slot in which the session is charging when it starts at
/// offset tr.
int start_slot0(const ChargingSession& session, int tr) { return session.arrival_slot - 1 + tr; }

}  // namespace

std::vector<std::vector<SessionOption>> session_options(const TechnologyCatalog& catalog, const Scenario& scenario) {
    const auto candidates = catalog.candidate_chargers();
    std::vector<std::vector<SessionOption>> out;
    out.reserve(scenario.sessions.size());
    for (const auto& session : scenario.sessions) {
        std::vector<SessionOption> row;
        row.reserve(candidates.size());
        for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
            const auto& type = catalog.chargers[static_cast<std::size_t>(candidates[static_cast<std::size_t>(c)].type)];
            SessionOption o;
            o.candidate = c;
            o.tau = catalog::charging_duration_slots(session, type, scenario.delta_t_hours);
            o.window = catalog::start_window_length(session, o.tau);
            o.rate_kw = catalog::effective_rate(session, type);
            row.push_back(o);
        }
        out.push_back(std::move(row));
    }
    return out;
}

ProblemBuilder::ProblemBuilder(ModelOptions options, int slot_count, int scenario_count)
    : options_(options) {
    maps_.slot_count = slot_count;
    maps_.scenario_count = scenario_count;
}

int ProblemBuilder::add_variable(VarKind kind, const VarIndex& idx, double lower, double upper, VarType type) {
    VariableRef ref;
    ref.key = {kind, idx};
    ref.lower = lower;
    ref.upper = upper;
    ref.type = type;
    const int column = problem_.add_column(ref);
    maps_.insert(ref.key, column);
    check_size();
    return column;
}

void ProblemBuilder::add_row(std::vector<Term> terms, Relation relation, double rhs, ConstraintFamily family,
                             const VarIndex& where) {
    problem_.add_row(std::move(terms), relation, rhs, family, where);
    check_size();
}

void ProblemBuilder::check_size() const {
    const auto cols = static_cast<std::size_t>(problem_.column_count());
    const auto rows = static_cast<std::size_t>(problem_.row_count());
    if (cols > options_.max_columns || rows > options_.max_rows) {
        throw ModelSizeError(fmt::format("ModelSizeError: model exceeds its size cap ({} columns, {} rows; caps {} / {})",
                                         cols, rows, options_.max_columns, options_.max_rows),
                             cols, rows);
    }
}

double annual_unit_cost(double invest_cost, double maintenance_cost, double discount_rate, double lifetime_years) {
    return catalog::capital_recovery_factor(discount_rate, lifetime_years) * invest_cost + maintenance_cost;
}

void add_design_variables(ProblemBuilder& builder, const TechnologyCatalog& catalog) {
    for (int p = 0; p < static_cast<int>(catalog.pv.size()); ++p) {
        builder.add_variable(VarKind::PvUnits, at_design(p), 0.0, catalog.pv[static_cast<std::size_t>(p)].max_units, VarType::Integer);
    }
    for (int w = 0; w < static_cast<int>(catalog.wt.size()); ++w) {
        builder.add_variable(VarKind::WtUnits, at_design(-1, w), 0.0, catalog.wt[static_cast<std::size_t>(w)].max_units, VarType::Integer);
    }
    for (int b = 0; b < static_cast<int>(catalog.bess.size()); ++b) {
        builder.add_variable(VarKind::BessUnits, at_design(-1, -1, b), 0.0, catalog.bess[static_cast<std::size_t>(b)].max_units,
                             VarType::Integer);
    }
    const auto candidates = catalog.candidate_chargers();
    for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
        builder.add_variable(VarKind::ChargerSelected, at_design(-1, -1, -1, c), 0.0, 1.0, VarType::Binary);
    }
    builder.maps().candidate_count = static_cast<int>(candidates.size());

    if (!builder.options().symmetry_breaking) return;
    // q_{c_l(j+1)} <= q_{c_l(j)}
    for (int c = 1; c < static_cast<int>(candidates.size()); ++c) {
        if (candidates[static_cast<std::size_t>(c)].type != candidates[static_cast<std::size_t>(c - 1)].type) continue;
        const int next = builder.column(VarKind::ChargerSelected, at_design(-1, -1, -1, c));
        const int prev = builder.column(VarKind::ChargerSelected, at_design(-1, -1, -1, c - 1));
        builder.add_row({{next, 1.0}, {prev, -1.0}}, Relation::LessEqual, 0.0, ConstraintFamily::SymmetryInstall,
                        at_design(-1, -1, -1, c));
    }
}

void add_grid_constraints(ProblemBuilder& builder, const Scenario& scenario, int s) {
    const double dt = scenario.delta_t_hours;
    for (int t = 0; t < scenario.slot_count(); ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const int grid = builder.add_variable(VarKind::GridPower, at_slot(t, s), -scenario.grid.injection_limit_kw[ts],
                                              scenario.grid.withdrawal_limit_kw[ts], VarType::Continuous);
        const int cost = builder.add_variable(VarKind::GridCost, at_slot(t, s), -kInf, kInf, VarType::Continuous);
        builder.add_row({{cost, 1.0}, {grid, -dt * scenario.grid.buy_price[ts]}}, Relation::GreaterEqual, 0.0,
                        ConstraintFamily::PriceRelaxation, at_slot(t, s));
        builder.add_row({{cost, 1.0}, {grid, -dt * scenario.grid.sell_price[ts]}}, Relation::GreaterEqual, 0.0,
                        ConstraintFamily::PriceRelaxation, at_slot(t, s));
    }
}

void add_bess_constraints(ProblemBuilder& builder, const TechnologyCatalog& catalog, const Scenario& scenario, int s) {
    if (catalog.bess.empty()) return;
    const int slots = scenario.slot_count();
    const double dt = scenario.delta_t_hours;
    const bool per_tech = builder.options().per_technology_bess_mode;

    if (!per_tech) {
        for (int t = 0; t < slots; ++t) builder.add_variable(VarKind::BessMode, at_slot(t, s), 0.0, 1.0, VarType::Binary);
    }

    for (int b = 0; b < static_cast<int>(catalog.bess.size()); ++b) {
        const auto& tech = catalog.bess[static_cast<std::size_t>(b)];
        const int units = builder.column(VarKind::BessUnits, at_design(-1, -1, b));
        const double big_m_charge = tech.max_units * tech.max_charge_kw;
        const double big_m_discharge = tech.max_units * tech.max_discharge_kw;
        const double soc_cap = tech.max_units * tech.unit_size_kwh * tech.soc_max_frac;

        std::vector<int> charge(static_cast<std::size_t>(slots));
        std::vector<int> discharge(static_cast<std::size_t>(slots));
        std::vector<int> mode(static_cast<std::size_t>(slots));
        std::vector<int> soc(static_cast<std::size_t>(slots) + 1);
        for (int t = 0; t < slots; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            charge[ts] = builder.add_variable(VarKind::BessCharge, at_bess(b, t, s), 0.0, big_m_charge, VarType::Continuous);
            discharge[ts] = builder.add_variable(VarKind::BessDischarge, at_bess(b, t, s), 0.0, big_m_discharge, VarType::Continuous);
            mode[ts] = per_tech ? builder.add_variable(VarKind::BessMode, at_bess(b, t, s), 0.0, 1.0, VarType::Binary)
                                : builder.column(VarKind::BessMode, at_slot(t, s));
        }
        // soc[t] is the state at the start of slot t; soc[slots] closes the day.
        for (int t = 0; t <= slots; ++t) {
            soc[static_cast<std::size_t>(t)] = builder.add_variable(VarKind::SocEnergy, at_bess(b, t, s), 0.0, soc_cap, VarType::Continuous);
        }

        builder.add_row({{soc[0], 1.0}, {units, -tech.unit_size_kwh * tech.soc_init_frac}}, Relation::Equal, 0.0,
                        ConstraintFamily::InitialSoc, at_bess(b, 0, s));
        for (int t = 0; t < slots; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            builder.add_row({{soc[ts + 1], 1.0},
                             {soc[ts], -1.0},
                             {charge[ts], -tech.charge_eff * dt},
                             {discharge[ts], dt / tech.discharge_eff},
                             {units, tech.self_discharge_per_h * tech.unit_size_kwh * dt}},
                            Relation::Equal, 0.0, ConstraintFamily::SocRecursion, at_bess(b, t, s));
        }
        for (int t = 0; t <= slots; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            builder.add_row({{soc[ts], 1.0}, {units, -tech.unit_size_kwh * tech.soc_max_frac}}, Relation::LessEqual, 0.0,
                            ConstraintFamily::SocBounds, at_bess(b, t, s));
            builder.add_row({{soc[ts], 1.0}, {units, -tech.unit_size_kwh * tech.soc_min_frac}}, Relation::GreaterEqual, 0.0,
                            ConstraintFamily::SocBounds, at_bess(b, t, s));
        }
        for (int t = 0; t < slots; ++t) {
            const auto ts = static_cast<std::size_t>(t);
            builder.add_row({{charge[ts], 1.0}, {units, -tech.max_charge_kw}}, Relation::LessEqual, 0.0,
                            ConstraintFamily::BessPowerCaps, at_bess(b, t, s));
            builder.add_row({{discharge[ts], 1.0}, {units, -tech.max_discharge_kw}}, Relation::LessEqual, 0.0,
                            ConstraintFamily::BessPowerCaps, at_bess(b, t, s));
            builder.add_row({{charge[ts], 1.0}, {mode[ts], -big_m_charge}}, Relation::LessEqual, 0.0,
                            ConstraintFamily::BessExclusivity, at_bess(b, t, s));
            builder.add_row({{discharge[ts], 1.0}, {mode[ts], big_m_discharge}}, Relation::LessEqual, big_m_discharge,
                            ConstraintFamily::BessExclusivity, at_bess(b, t, s));
        }
    }
}

void add_session_constraints(ProblemBuilder& builder, const TechnologyCatalog& catalog, const Scenario& scenario,
                             int s) {
    const auto candidates = catalog.candidate_chargers();
    const int n_candidates = static_cast<int>(candidates.size());
    const int slots = scenario.slot_count();
    const auto options = session_options(catalog, scenario);

    for (int v = 0; v < static_cast<int>(scenario.sessions.size()); ++v) {
        int total_window = 0;
        for (const auto& o : options[static_cast<std::size_t>(v)]) total_window += o.window;
        if (total_window == 0) {
            const auto& session = scenario.sessions[static_cast<std::size_t>(v)];
            throw InfeasibleInstance(fmt::format("InfeasibleInstance: scenario '{}' vehicle '{}' fits no candidate charger inside slots {}..{}",
                                                 scenario.id, session.vehicle_id, session.arrival_slot, session.departure_slot));
        }
    }

    // Start binaries; active[c][t] lists (vehicle, column) charging on c in slot t.
    std::vector<std::vector<std::vector<std::pair<int, int>>>> active(
        static_cast<std::size_t>(n_candidates), std::vector<std::vector<std::pair<int, int>>>(static_cast<std::size_t>(slots)));
    for (int v = 0; v < static_cast<int>(scenario.sessions.size()); ++v) {
        const auto& session = scenario.sessions[static_cast<std::size_t>(v)];
        for (const auto& o : options[static_cast<std::size_t>(v)]) {
            for (int tr = 0; tr < o.window; ++tr) {
                const int x = builder.add_variable(VarKind::ChargeStart, at_start(v, o.candidate, tr, s), 0.0, 1.0, VarType::Binary);
                const int first = start_slot0(session, tr);
                for (int t = first; t < first + o.tau; ++t) {
                    active[static_cast<std::size_t>(o.candidate)][static_cast<std::size_t>(t)].emplace_back(v, x);
                }
            }
        }
    }

    // x_{v,c,tr,s} <= q_c
    for (int v = 0; v < static_cast<int>(scenario.sessions.size()); ++v) {
        for (const auto& o : options[static_cast<std::size_t>(v)]) {
            const int q = builder.column(VarKind::ChargerSelected, at_design(-1, -1, -1, o.candidate));
            for (int tr = 0; tr < o.window; ++tr) {
                const int x = builder.column(VarKind::ChargeStart, at_start(v, o.candidate, tr, s));
                builder.add_row({{x, 1.0}, {q, -1.0}}, Relation::LessEqual, 0.0, ConstraintFamily::ChargerLinking,
                                at_start(v, o.candidate, tr, s));
            }
        }
    }

    // exactly one start per vehicle
    for (int v = 0; v < static_cast<int>(scenario.sessions.size()); ++v) {
        std::vector<Term> terms;
        for (const auto& o : options[static_cast<std::size_t>(v)]) {
            for (int tr = 0; tr < o.window; ++tr) terms.push_back({builder.column(VarKind::ChargeStart, at_start(v, o.candidate, tr, s)), 1.0});
        }
        VarIndex where;
        where.v = v;
        where.s = s;
        builder.add_row(std::move(terms), Relation::Equal, 1.0, ConstraintFamily::ExactlyOneStart, where);
    }

    // occupancy and charger power
    for (int c = 0; c < n_candidates; ++c) {
        const auto& type = catalog.chargers[static_cast<std::size_t>(candidates[static_cast<std::size_t>(c)].type)];
        for (int t = 0; t < slots; ++t) {
            const auto& here = active[static_cast<std::size_t>(c)][static_cast<std::size_t>(t)];
            std::vector<Term> occupancy;
            for (const auto& [v, x] : here) occupancy.push_back({x, 1.0});
            builder.add_row(std::move(occupancy), Relation::LessEqual, 1.0, ConstraintFamily::Occupancy, at_charger(c, t, s));

            const int power = builder.add_variable(VarKind::ChargerPower, at_charger(c, t, s), 0.0, type.max_power_kw,
                                                   VarType::Continuous);
            std::vector<Term> definition{{power, 1.0}};
            for (const auto& [v, x] : here) {
                definition.push_back({x, -options[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)].rate_kw});
            }
            builder.add_row(std::move(definition), Relation::Equal, 0.0, ConstraintFamily::ChargerPower, at_charger(c, t, s));
        }
    }

    if (!builder.options().symmetry_breaking) return;
    // A session may start on c_l(j+1) in slot t only while another session
    // occupies c_l(j) in that slot.
    for (int c = 1; c < n_candidates; ++c) {
        if (candidates[static_cast<std::size_t>(c)].type != candidates[static_cast<std::size_t>(c - 1)].type) continue;
        const int lower = c - 1;
        for (int v = 0; v < static_cast<int>(scenario.sessions.size()); ++v) {
            const auto& session = scenario.sessions[static_cast<std::size_t>(v)];
            const auto& o = options[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)];
            for (int tr = 0; tr < o.window; ++tr) {
                const int t = start_slot0(session, tr);
                std::vector<Term> terms{{builder.column(VarKind::ChargeStart, at_start(v, c, tr, s)), 1.0}};
                for (const auto& [other, x] : active[static_cast<std::size_t>(lower)][static_cast<std::size_t>(t)]) {
                    if (other != v) terms.push_back({x, -1.0});
                }
                builder.add_row(std::move(terms), Relation::LessEqual, 0.0, ConstraintFamily::SymmetryUsage,
                                at_start(v, c, tr, s));
            }
        }
    }
}

void add_power_balance(ProblemBuilder& builder, const TechnologyCatalog& catalog, const Scenario& scenario, int s) {
    const int n_candidates = catalog.candidate_count();
    for (int t = 0; t < scenario.slot_count(); ++t) {
        const auto ts = static_cast<std::size_t>(t);
        std::vector<Term> terms;
        for (int p = 0; p < static_cast<int>(catalog.pv.size()); ++p) {
            const double unit = catalog::pv_unit_power(catalog.pv[static_cast<std::size_t>(p)], scenario.irradiance_kw_m2[ts]);
            terms.push_back({builder.column(VarKind::PvUnits, at_design(p)), unit});
        }
        for (int w = 0; w < static_cast<int>(catalog.wt.size()); ++w) {
            const double unit = catalog::wt_unit_power_from_measured(catalog.wt[static_cast<std::size_t>(w)], scenario.wind_speed_m_s[ts]);
            terms.push_back({builder.column(VarKind::WtUnits, at_design(-1, w)), unit});
        }
        terms.push_back({builder.column(VarKind::GridPower, at_slot(t, s)), 1.0});
        for (int b = 0; b < static_cast<int>(catalog.bess.size()); ++b) {
            terms.push_back({builder.column(VarKind::BessDischarge, at_bess(b, t, s)), 1.0});
            terms.push_back({builder.column(VarKind::BessCharge, at_bess(b, t, s)), -1.0});
        }
        for (int c = 0; c < n_candidates; ++c) terms.push_back({builder.column(VarKind::ChargerPower, at_charger(c, t, s)), -1.0});
        builder.add_row(std::move(terms), Relation::Equal, 0.0, ConstraintFamily::PowerBalance, at_slot(t, s));
    }
}

void build_objective(ProblemBuilder& builder, const TechnologyCatalog& catalog, const ScenarioSet& scenarios,
                     const EconomicParams& economics) {
    auto& problem = builder.problem();
    const double r = economics.discount_rate;
    for (int p = 0; p < static_cast<int>(catalog.pv.size()); ++p) {
        const auto& tech = catalog.pv[static_cast<std::size_t>(p)];
        problem.add_cost(builder.column(VarKind::PvUnits, at_design(p)),
                         annual_unit_cost(tech.invest_cost, tech.maintenance_cost, r, tech.lifetime_years));
    }
    for (int w = 0; w < static_cast<int>(catalog.wt.size()); ++w) {
        const auto& tech = catalog.wt[static_cast<std::size_t>(w)];
        problem.add_cost(builder.column(VarKind::WtUnits, at_design(-1, w)),
                         annual_unit_cost(tech.invest_cost, tech.maintenance_cost, r, tech.lifetime_years));
    }
    for (int b = 0; b < static_cast<int>(catalog.bess.size()); ++b) {
        const auto& tech = catalog.bess[static_cast<std::size_t>(b)];
        problem.add_cost(builder.column(VarKind::BessUnits, at_design(-1, -1, b)),
                         annual_unit_cost(tech.invest_cost, tech.maintenance_cost, r, tech.lifetime_years));
    }
    const auto candidates = catalog.candidate_chargers();
    for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
        const auto& type = catalog.chargers[static_cast<std::size_t>(candidates[static_cast<std::size_t>(c)].type)];
        problem.add_cost(builder.column(VarKind::ChargerSelected, at_design(-1, -1, -1, c)),
                         annual_unit_cost(type.invest_cost, type.maintenance_cost, r, type.lifetime_years));
    }
    for (int s = 0; s < static_cast<int>(scenarios.scenarios.size()); ++s) {
        const auto& scenario = scenarios.scenarios[static_cast<std::size_t>(s)];
        const double days = scenario.occurrence_days;
        for (int t = 0; t < scenario.slot_count(); ++t) {
            problem.add_cost(builder.column(VarKind::GridCost, at_slot(t, s)), days);
            for (int b = 0; b < static_cast<int>(catalog.bess.size()); ++b) {
                const double deg = days * catalog.bess[static_cast<std::size_t>(b)].degradation_cost_per_kw;
                problem.add_cost(builder.column(VarKind::BessCharge, at_bess(b, t, s)), deg);
                problem.add_cost(builder.column(VarKind::BessDischarge, at_bess(b, t, s)), deg);
            }
        }
    }
}

BuiltModel build_problem(const TechnologyCatalog& catalog, const ScenarioSet& scenarios,
                         const EconomicParams& economics, const ModelOptions& options) {
    ProblemBuilder builder(options, scenarios.slot_count(), static_cast<int>(scenarios.scenarios.size()));
    builder.maps().max_parked_slots = scenarios.max_parked_slots();
    add_design_variables(builder, catalog);
    for (int s = 0; s < static_cast<int>(scenarios.scenarios.size()); ++s) {
        const auto& scenario = scenarios.scenarios[static_cast<std::size_t>(s)];
        add_grid_constraints(builder, scenario, s);
        add_bess_constraints(builder, catalog, scenario, s);
        add_session_constraints(builder, catalog, scenario, s);
        add_power_balance(builder, catalog, scenario, s);
    }
    build_objective(builder, catalog, scenarios, economics);
    return {std::move(builder.problem()), std::move(builder.maps())};
}

BuiltModel build_problem(const ModelInputs& inputs) {
    return build_problem(inputs.catalog, inputs.scenarios, inputs.economics, inputs.options);
}

}  // namespace ceh::model
