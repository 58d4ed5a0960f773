#include "ceh/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace ceh::synthetic {

namespace {

constexpr int kSlots = 24;
constexpr double kTruckRateKw = 400.0;

/// mt19937_64 is specified bit for bit; the standard distributions are not,
/// so the mapping to reals is done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1p-53; }
    int integer(int lo, int hi) { return lo + static_cast<int>(std::floor(uniform(0.0, 1.0) * (hi - lo + 1))); }

private:
    std::mt19937_64 engine_;
};

/// 0 in midwinter, 1 in midsummer.
double season(int month) { return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (month - 0.5) / 12.0)); }

double round_to(double v, double step) { return std::round(v / step) * step; }

ingest::MonthlyProfile weather_and_prices(int month, Rng& rng) {
    const double s = season(month);
    ingest::MonthlyProfile m;
    m.month = month;
    const double peak = 0.15 + 0.6 * s;        // kW/m^2
    const double day_length = 8.0 + 8.5 * s;   // hours
    const double sunrise = 13.0 - day_length / 2.0;
    const double wind_mean = 4.0 + 1.5 * (1.0 - s);
    const double spot_base = 0.09 + 0.03 * (1.0 - s);
    for (int h = 0; h < kSlots; ++h) {
        const double mid = h + 0.5;
        const double phase = (mid - sunrise) / day_length;
        double g = phase > 0.0 && phase < 1.0 ? peak * std::sin(std::numbers::pi * phase) : 0.0;
        g *= 1.0 - rng.uniform(0.0, 0.3);
        m.irradiance_kw_m2.push_back(round_to(g, 1e-4));

        const double diurnal = 0.8 * std::sin(2.0 * std::numbers::pi * (mid - 9.0) / 24.0);
        m.wind_speed_m_s.push_back(round_to(std::max(0.0, wind_mean + diurnal + rng.uniform(-0.6, 0.6)), 1e-3));

        const bool daytime = h >= 8 && h < 20;
        m.grid.withdrawal_limit_kw.push_back(daytime ? 600.0 : 800.0);
        m.grid.injection_limit_kw.push_back(daytime ? 600.0 : 800.0);

        double spot = spot_base;
        if ((h >= 7 && h < 9) || (h >= 17 && h < 20)) spot += 0.05;
        if (h >= 11 && h < 15) spot -= 0.04 * (0.5 + s);
        spot += rng.uniform(-0.01, 0.01);
        m.grid.buy_price.push_back(round_to(spot + 0.06, 1e-5));
        m.grid.sell_price.push_back(round_to(spot - 0.01, 1e-5));
    }
    return m;
}

ingest::DemandProfile demand(int month, ingest::DayKind kind, int count, Rng& rng) {
    ingest::DemandProfile d;
    d.month = month;
    d.kind = kind;
    const double scale = 1.0 + 0.1 * std::cos(2.0 * std::numbers::pi * (month - 1) / 12.0);
    for (int v = 0; v < count; ++v) {
        ChargingSession session;
        session.vehicle_id = fmt::format("T{:02d}", v + 1);
        session.max_vehicle_rate_kw = kTruckRateKw;
        session.energy_kwh = round_to(std::min(540.0, scale * rng.uniform(150.0, 450.0)), 0.1);
        const int slowest = static_cast<int>(std::ceil(session.energy_kwh / 180.0 - 1e-9));
        const int parked = std::max(2, slowest + rng.integer(0, 4));
        // Drivers return in waves: morning depot stops, midday breaks and
        // evening returns.
        const int wave = v % 3;
        int arrival = wave == 0 ? rng.integer(1, 6) : wave == 1 ? rng.integer(9, 14) : rng.integer(16, 20);
        arrival = std::min(arrival, kSlots - parked + 1);
        session.arrival_slot = arrival;
        session.departure_slot = arrival + parked - 1;
        d.sessions.push_back(session);
    }
    return d;
}

}  // namespace

TechnologyCatalog case_study_catalog() {
    TechnologyCatalog c;
    PvTechnology pv;
    pv.id = "pv550";
    pv.invest_cost = 495.0;
    pv.maintenance_cost = 4.95;
    pv.lifetime_years = 20.0;
    c.pv.push_back(pv);

    WtTechnology wt;
    wt.id = "wt500";
    wt.invest_cost = 750000.0;
    wt.maintenance_cost = 7500.0;
    wt.lifetime_years = 20.0;
    c.wt.push_back(wt);

    BessTechnology b;
    b.id = "bess580";
    b.invest_cost = 32000.0;
    b.maintenance_cost = 320.0;
    b.degradation_cost_per_kw = 0.03;
    b.lifetime_years = 15.0;
    c.bess.push_back(b);

    ChargerType slow;
    slow.id = "dc180";
    slow.max_power_kw = 180.0;
    slow.invest_cost = 90000.0;
    slow.maintenance_cost = 900.0;
    slow.candidate_count = 6;
    slow.lifetime_years = 10.0;
    ChargerType fast = slow;
    fast.id = "dc360";
    fast.max_power_kw = 360.0;
    fast.invest_cost = 180000.0;
    fast.maintenance_cost = 1800.0;
    c.chargers = {slow, fast};
    return c;
}

EconomicParams case_study_economics() { return EconomicParams{}; }

ModelInputs case_study(const CaseStudyOptions& options) {
    Rng rng(options.seed);
    std::vector<ingest::MonthlyProfile> weather;
    std::vector<ingest::DemandProfile> demands;
    for (int month = 1; month <= 12; ++month) {
        weather.push_back(weather_and_prices(month, rng));
        demands.push_back(demand(month, ingest::DayKind::Weekday, options.weekday_sessions, rng));
        demands.push_back(demand(month, ingest::DayKind::Weekend, options.weekend_sessions, rng));
    }
    ModelInputs inputs;
    inputs.catalog = case_study_catalog();
    inputs.economics = case_study_economics();
    inputs.scenarios = ingest::build_scenarios(options.year, 1.0, weather, demands);
    inputs.warnings = ingest::validate_inputs(inputs.catalog, inputs.scenarios, inputs.economics);
    return inputs;
}

}  // namespace ceh::synthetic
