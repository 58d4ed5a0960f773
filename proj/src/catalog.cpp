#include "ceh/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ceh/errors.hpp"

namespace ceh {

namespace {
// Absorbs representation error in E/p before taking the ceiling, so that
// exact divisions such as 360/360 do not round up to the next hour.
constexpr double kCeilSlack = 1e-9;

double duration_slots_exact(const ChargingSession& session, const ChargerType& charger,
                            double delta_t_hours) {
    const double rate = catalog::effective_rate(session, charger);
    const double hours = std::ceil(session.energy_kwh / rate - kCeilSlack);
    return hours / delta_t_hours;
}
}  // namespace

double WtTechnology::efficiency_coefficient() const {
    const double rated_w = rated_power_kw * 1000.0;
    return rated_w / (0.5 * air_density_kg_m3 * swept_area_m2 * std::pow(rated_speed_m_s, 3));
}

std::vector<CandidateCharger> TechnologyCatalog::candidate_chargers() const {
    std::vector<CandidateCharger> out;
    for (int l = 0; l < static_cast<int>(chargers.size()); ++l) {
        for (int j = 0; j < chargers[l].candidate_count; ++j) out.push_back({l, j});
    }
    return out;
}

int TechnologyCatalog::candidate_count() const {
    int n = 0;
    for (const auto& c : chargers) n += c.candidate_count;
    return n;
}

namespace catalog {

double pv_unit_power(const PvTechnology& tech, double irradiance_kw_m2) {
    return tech.efficiency * tech.area_m2 * irradiance_kw_m2;
}

double scale_wind_speed(const WtTechnology& tech, double measured_m_s) {
    if (!(tech.measurement_height_m > 0.0)) {
        throw ConfigError("wind turbine '" + tech.id + "': measurement height must be positive");
    }
    return measured_m_s * std::pow(tech.hub_height_m / tech.measurement_height_m, tech.shear_exponent);
}

double wt_unit_power(const WtTechnology& tech, double hub_speed_m_s) {
    const double v = hub_speed_m_s;
    if (v < tech.cut_in_m_s || v > tech.cut_out_m_s) return 0.0;
    if (v >= tech.rated_speed_m_s) return tech.rated_power_kw;
    const double watts =
        0.5 * tech.efficiency_coefficient() * tech.air_density_kg_m3 * tech.swept_area_m2 * v * v * v;
    return watts / 1000.0;
}

double wt_unit_power_from_measured(const WtTechnology& tech, double measured_m_s) {
    return wt_unit_power(tech, scale_wind_speed(tech, measured_m_s));
}

double capital_recovery_factor(double rate, double lifetime_years) {
    if (!(rate > 0.0)) throw ConfigError("capital recovery factor needs a positive discount rate");
    if (!(lifetime_years >= 1.0)) throw ConfigError("capital recovery factor needs a lifetime of at least one year");
    const double growth = std::pow(1.0 + rate, lifetime_years);
    return rate * growth / (growth - 1.0);
}

double effective_rate(const ChargingSession& session, const ChargerType& charger) {
    return std::min(session.max_vehicle_rate_kw, charger.max_power_kw);
}

int charging_duration_slots(const ChargingSession& session, const ChargerType& charger,
                            double delta_t_hours) {
    const double slots = duration_slots_exact(session, charger, delta_t_hours);
    const double nearest = std::round(slots);
    if (std::abs(slots - nearest) <= kCeilSlack * std::max(1.0, slots)) return static_cast<int>(nearest);
    return static_cast<int>(std::ceil(slots));
}

bool duration_needs_extra_rounding(const ChargingSession& session, const ChargerType& charger,
                                   double delta_t_hours) {
    const double slots = duration_slots_exact(session, charger, delta_t_hours);
    return std::abs(slots - std::round(slots)) > kCeilSlack * std::max(1.0, slots);
}

int start_window_length(const ChargingSession& session, int tau) {
    return std::max(0, session.departure_slot - session.arrival_slot - tau + 2);
}

void check_session_feasibility(const ChargingSession& session,
                               const std::vector<ChargerType>& chargers,
                               double delta_t_hours) {
    int best = std::numeric_limits<int>::max();
    for (const auto& c : chargers) best = std::min(best, charging_duration_slots(session, c, delta_t_hours));
    if (chargers.empty() || best > session.available_slots()) {
        std::ostringstream msg;
        msg << "InfeasibleSession: vehicle '" << session.vehicle_id << "' needs ";
        if (chargers.empty()) {
            msg << "a charger but the catalog has none";
        } else {
            msg << best << " slot(s) on the fastest charger but is parked for "
                << session.available_slots() << " slot(s) (" << session.arrival_slot << ".."
                << session.departure_slot << ")";
        }
        throw InfeasibleSession(msg.str());
    }
}

}  // namespace catalog
}  // namespace ceh
