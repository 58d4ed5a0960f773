#pragma once

#include <string>
#include <vector>

#include "ceh/inputs.hpp"

namespace ceh {

struct PvTechnology {
    std::string id;
    double efficiency = 0.2;
    double area_m2 = 2.58;
    double invest_cost = 0.0;       // EUR per unit
    double maintenance_cost = 0.0;  // EUR per unit and year
    double lifetime_years = 20.0;
    int max_units = 10000;

    bool operator==(const PvTechnology&) const = default;
};

struct WtTechnology {
    std::string id;
    double cut_in_m_s = 3.0;
    double rated_speed_m_s = 13.0;
    double cut_out_m_s = 20.0;
    double rated_power_kw = 500.0;
    double swept_area_m2 = 1734.0;
    double air_density_kg_m3 = 1.225;
    double hub_height_m = 60.0;
    double measurement_height_m = 10.0;
    double shear_exponent = 0.143;
    double invest_cost = 0.0;
    double maintenance_cost = 0.0;
    double lifetime_years = 20.0;
    int max_units = 10;

    /// Power coefficient that makes the cubic law hit rated power exactly at
    /// the rated speed.
    double efficiency_coefficient() const;

    bool operator==(const WtTechnology&) const = default;
};

/// The Betz limit on the fraction of wind power a rotor can extract.
inline constexpr double kBetzLimit = 16.0 / 27.0;

struct BessTechnology {
    std::string id;
    double unit_size_kwh = 580.0;
    double charge_eff = 0.95;
    double discharge_eff = 0.95;
    double self_discharge_per_h = 1e-4;
    double soc_min_frac = 0.1;
    double soc_max_frac = 0.95;
    double soc_init_frac = 0.5;
    double max_charge_kw = 300.0;
    double max_discharge_kw = 300.0;
    int max_units = 100;
    double invest_cost = 0.0;
    double maintenance_cost = 0.0;
    double degradation_cost_per_kw = 0.0;
    double lifetime_years = 15.0;

    bool operator==(const BessTechnology&) const = default;
};

struct ChargerType {
    std::string id;
    double max_power_kw = 180.0;
    double invest_cost = 0.0;
    double maintenance_cost = 0.0;
    int candidate_count = 1;
    double lifetime_years = 10.0;

    bool operator==(const ChargerType&) const = default;
};

/// One installable charger position: the `ordinal`-th (0-based) candidate of
/// charger type `type`.
struct CandidateCharger {
    int type = 0;
    int ordinal = 0;

    bool operator==(const CandidateCharger&) const = default;
};

struct TechnologyCatalog {
    std::vector<PvTechnology> pv;
    std::vector<WtTechnology> wt;
    std::vector<BessTechnology> bess;
    std::vector<ChargerType> chargers;

    /// Candidate chargers grouped by type, types in catalog order.
    std::vector<CandidateCharger> candidate_chargers() const;
    int candidate_count() const;

    bool operator==(const TechnologyCatalog&) const = default;
};

namespace catalog {

/// Output of a single PV unit in kW for irradiance in kW/m^2.
double pv_unit_power(const PvTechnology& tech, double irradiance_kw_m2);

/// Power-law extrapolation of a measured wind speed to hub height.
/// Throws ConfigError when the measurement height is not positive.
double scale_wind_speed(const WtTechnology& tech, double measured_m_s);

/// Output of a single turbine in kW at the given hub-height wind speed.
/// Zero outside [cut_in, cut_out]; cubic law on [cut_in, rated); rated power
/// on [rated, cut_out].
double wt_unit_power(const WtTechnology& tech, double hub_speed_m_s);

/// Convenience: measured speed -> hub speed -> unit power.
double wt_unit_power_from_measured(const WtTechnology& tech, double measured_m_s);

/// kappa = r (1+r)^L / ((1+r)^L - 1). Throws ConfigError for r <= 0 or L < 1.
double capital_recovery_factor(double rate, double lifetime_years);

double effective_rate(const ChargingSession& session, const ChargerType& charger);

/// Slots needed to deliver the session energy at the effective rate:
/// (1/dt) * ceil(E / p), rounded up again to whole slots when dt does not
/// divide the hour count.
int charging_duration_slots(const ChargingSession& session, const ChargerType& charger,
                            double delta_t_hours);

/// True when charging_duration_slots had to round (1/dt)*ceil(E/p) up.
bool duration_needs_extra_rounding(const ChargingSession& session, const ChargerType& charger,
                                   double delta_t_hours);

/// Number of admissible relative start offsets t_r = 1..n for the session on
/// a charger with duration `tau`; zero when the session does not fit.
int start_window_length(const ChargingSession& session, int tau);

/// Throws InfeasibleSession when the session cannot be completed inside its
/// window on any charger type of the catalog.
void check_session_feasibility(const ChargingSession& session,
                               const std::vector<ChargerType>& chargers,
                               double delta_t_hours);

}  // namespace catalog
}  // namespace ceh
