#include "instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <unistd.h>

#include "ceh/catalog.hpp"
#include "ceh/errors.hpp"
#include "ceh/synthetic.hpp"

namespace cehtest {

namespace fs = std::filesystem;

fs::path source_dir() { return CEH_SOURCE_DIR; }
fs::path tiny_config() { return source_dir() / "data" / "tiny" / "config.json"; }
fs::path case_study_config() { return source_dir() / "data" / "case_study" / "config.json"; }

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / fmt::format("cehtest-{}-{}", ::getpid(), name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double Rng::rounded(double lo, double hi, double step) { return std::round(uniform(lo, hi) / step) * step; }

ceh::ModelInputs tiny_example() { return ceh::ingest::load_inputs(tiny_config()); }

ceh::Scenario flat_scenario(const std::string& id, int days, int slots) {
    ceh::Scenario s;
    s.id = id;
    s.occurrence_days = days;
    s.delta_t_hours = 24.0 / slots;
    const auto n = static_cast<std::size_t>(slots);
    s.irradiance_kw_m2.assign(n, 0.0);
    s.wind_speed_m_s.assign(n, 0.0);
    s.grid.withdrawal_limit_kw.assign(n, 1000.0);
    s.grid.injection_limit_kw.assign(n, 1000.0);
    s.grid.buy_price.assign(n, 0.20);
    s.grid.sell_price.assign(n, 0.05);
    return s;
}

ceh::ChargingSession session(const std::string& id, int arrival, int departure, double energy_kwh, double max_rate_kw) {
    ceh::ChargingSession s;
    s.vehicle_id = id;
    s.arrival_slot = arrival;
    s.departure_slot = departure;
    s.energy_kwh = energy_kwh;
    s.max_vehicle_rate_kw = max_rate_kw;
    return s;
}

ceh::ChargerType charger_type(const std::string& id, double max_power_kw, double invest_cost, int candidates) {
    ceh::ChargerType c;
    c.id = id;
    c.max_power_kw = max_power_kw;
    c.invest_cost = invest_cost;
    c.maintenance_cost = 0.01 * invest_cost;
    c.candidate_count = candidates;
    return c;
}

ceh::BessTechnology case_study_bess() { return ceh::synthetic::case_study_catalog().bess.front(); }

ceh::ModelInputs make_inputs(ceh::TechnologyCatalog catalog, std::vector<ceh::Scenario> scenarios, ceh::ModelOptions options) {
    ceh::ModelInputs in;
    in.catalog = std::move(catalog);
    in.scenarios.scenarios = std::move(scenarios);
    in.options = options;
    in.warnings = ceh::ingest::validate_inputs(in.catalog, in.scenarios, in.economics);
    return in;
}

namespace {

ceh::TechnologyCatalog random_catalog(Rng& rng) {
    ceh::TechnologyCatalog cat;
    if (rng.chance(0.7)) {
        ceh::PvTechnology pv;
        pv.id = "pv";
        pv.area_m2 = rng.rounded(100.0, 600.0, 10.0);
        pv.invest_cost = rng.rounded(15000.0, 80000.0, 100.0);
        pv.maintenance_cost = rng.chance(0.5) ? 0.01 * pv.invest_cost : 0.0;
        pv.max_units = rng.integer(1, 2);
        cat.pv.push_back(pv);
    }
    if (rng.chance(0.4)) {
        ceh::WtTechnology wt;
        wt.id = "wt";
        wt.rated_power_kw = rng.rounded(100.0, 300.0, 10.0);
        // power coefficient 0.4 at rated speed
        wt.swept_area_m2 = wt.rated_power_kw * 1000.0 / (0.5 * wt.air_density_kg_m3 * std::pow(wt.rated_speed_m_s, 3) * 0.4);
        wt.invest_cost = rng.rounded(80000.0, 300000.0, 1000.0);
        wt.maintenance_cost = 0.01 * wt.invest_cost;
        wt.max_units = rng.integer(1, 2);
        cat.wt.push_back(wt);
    }
    if (rng.chance(0.7)) {
        ceh::BessTechnology b;
        b.id = "bess";
        b.unit_size_kwh = rng.rounded(100.0, 300.0, 10.0);
        b.charge_eff = rng.rounded(0.88, 0.99, 0.01);
        b.discharge_eff = rng.rounded(0.88, 0.99, 0.01);
        b.max_charge_kw = rng.rounded(50.0, 150.0, 10.0);
        b.max_discharge_kw = rng.rounded(50.0, 150.0, 10.0);
        b.max_units = rng.integer(1, 2);
        b.invest_cost = rng.rounded(8000.0, 40000.0, 100.0);
        b.maintenance_cost = 0.01 * b.invest_cost;
        b.degradation_cost_per_kw = rng.rounded(0.0, 0.05, 0.005);
        cat.bess.push_back(b);
    }
    if (rng.chance(0.5)) {
        cat.chargers.push_back(charger_type("dc", rng.rounded(100.0, 400.0, 10.0), rng.rounded(20000.0, 60000.0, 1000.0), rng.integer(1, 2)));
    } else {
        cat.chargers.push_back(charger_type("slow", rng.rounded(100.0, 200.0, 10.0), rng.rounded(15000.0, 40000.0, 1000.0), 1));
        cat.chargers.push_back(charger_type("fast", rng.rounded(200.0, 400.0, 10.0), rng.rounded(30000.0, 80000.0, 1000.0), 1));
    }
    return cat;
}

ceh::Scenario random_scenario(Rng& rng, const ceh::TechnologyCatalog& cat, const std::string& id, int days, int slots) {
    ceh::Scenario s = flat_scenario(id, days, slots);
    const double dt = s.delta_t_hours;
    for (std::size_t t = 0; t < static_cast<std::size_t>(slots); ++t) {
        const double hour = (static_cast<double>(t) + 0.5) * dt;
        const double sun = std::max(0.0, std::sin(std::numbers::pi * (hour - 6.0) / 12.0));
        s.irradiance_kw_m2[t] = std::round(sun * rng.uniform(0.3, 0.8) * 1000.0) / 1000.0;
        s.wind_speed_m_s[t] = rng.rounded(0.0, 14.0, 0.1);
        s.grid.withdrawal_limit_kw[t] = rng.rounded(200.0, 600.0, 10.0);
        s.grid.injection_limit_kw[t] = rng.rounded(0.0, 300.0, 10.0);
        const double buy = rng.rounded(0.12, 0.35, 0.005);
        s.grid.buy_price[t] = buy;
        s.grid.sell_price[t] = rng.rounded(0.01, buy - 0.02, 0.005);
    }
    double fastest = 0.0;
    for (const auto& c : cat.chargers) fastest = std::max(fastest, c.max_power_kw);
    const int vehicles = rng.integer(0, 2);
    for (int v = 0; v < vehicles; ++v) {
        const int arrival = rng.integer(1, slots - 1);
        const int departure = rng.integer(arrival + 1, slots);
        const double max_rate = rng.rounded(100.0, 400.0, 10.0);
        const double rate = std::min(max_rate, fastest);
        const int parked = departure - arrival + 1;
        auto ev = session(fmt::format("ev{}", v + 1), arrival, departure, 0.0, max_rate);
        // Shrink until the session fits the fastest charger.
        double energy = std::round(rng.uniform(0.1, 1.0) * rate * parked * dt);
        for (;;) {
            ev.energy_kwh = std::max(1.0, energy);
            try {
                ceh::catalog::check_session_feasibility(ev, cat.chargers, dt);
                break;
            } catch (const ceh::InfeasibleSession&) {
                energy = std::floor(energy * 0.7);
            }
        }
        s.sessions.push_back(ev);
    }
    return s;
}

}  // namespace

ceh::ModelInputs random_tiny(std::uint64_t seed) {
    Rng rng(seed);
    auto cat = random_catalog(rng);
    const int slots = rng.chance(0.5) ? 6 : 4;
    std::vector<ceh::Scenario> scenarios;
    if (rng.chance(0.5)) {
        scenarios.push_back(random_scenario(rng, cat, "day", 365, slots));
    } else {
        const int first = rng.integer(100, 265);
        scenarios.push_back(random_scenario(rng, cat, "weekday", first, slots));
        scenarios.push_back(random_scenario(rng, cat, "weekend", 365 - first, slots));
    }
    return make_inputs(std::move(cat), std::move(scenarios));
}

ceh::ModelInputs medium_instance(double withdrawal_scale) {
    ceh::synthetic::CaseStudyOptions options;
    options.year = 2023;
    options.weekday_sessions = 12;
    options.weekend_sessions = 2;
    const auto full = ceh::synthetic::case_study(options);
    auto cat = full.catalog;
    for (auto& c : cat.chargers) c.candidate_count = 2;
    // more units would carry the whole day on their free initial charge
    cat.bess.front().max_units = 2;
    std::vector<ceh::Scenario> scenarios{full.scenarios.scenarios[0], full.scenarios.scenarios[12]};
    scenarios[0].occurrence_days = 183;
    scenarios[1].occurrence_days = 182;
    for (auto& s : scenarios)
        for (auto& limit : s.grid.withdrawal_limit_kw) limit *= withdrawal_scale;
    return make_inputs(std::move(cat), std::move(scenarios));
}

}  // namespace cehtest
