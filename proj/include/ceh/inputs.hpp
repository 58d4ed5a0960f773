#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ceh {

enum class AssetClass { Pv = 0, Wt = 1, Bess = 2, Charger = 3 };

inline constexpr std::array<AssetClass, 4> kAssetClasses = {
    AssetClass::Pv, AssetClass::Wt, AssetClass::Bess, AssetClass::Charger};

std::string_view to_string(AssetClass asset);

struct EconomicParams {
    double discount_rate = 0.0275;  // per year
    /// Default lifetime in years per asset class, indexed by AssetClass.
    /// Individual technologies may override it.
    std::array<double, 4> lifetimes_years = {20.0, 20.0, 15.0, 10.0};
    /// Annual maintenance as a fraction of invest cost; used for technologies
    /// that do not state an absolute maintenance cost.
    double maintenance_fraction = 0.01;

    double lifetime(AssetClass asset) const { return lifetimes_years[static_cast<std::size_t>(asset)]; }

    bool operator==(const EconomicParams&) const = default;
};

/// Grid connection contract of one representative day. All series hold one
/// value per slot; limits in kW, prices in EUR/kWh.
struct GridContract {
    std::vector<double> withdrawal_limit_kw;
    std::vector<double> injection_limit_kw;
    std::vector<double> buy_price;
    std::vector<double> sell_price;

    bool operator==(const GridContract&) const = default;
};

/// One vehicle visit. Slots are 1-based and inclusive: the vehicle may draw
/// power in every slot of [arrival_slot, departure_slot].
struct ChargingSession {
    std::string vehicle_id;
    int arrival_slot = 1;
    int departure_slot = 1;
    double energy_kwh = 0.0;
    double max_vehicle_rate_kw = 0.0;

    /// Slots available for charging, departure slot included.
    int available_slots() const { return departure_slot - arrival_slot + 1; }

    bool operator==(const ChargingSession&) const = default;
};

struct Scenario {
    std::string id;
    int occurrence_days = 0;
    double delta_t_hours = 1.0;
    std::vector<double> irradiance_kw_m2;
    std::vector<double> wind_speed_m_s;  // measured, before hub-height scaling
    GridContract grid;
    std::vector<ChargingSession> sessions;

    int slot_count() const { return static_cast<int>(irradiance_kw_m2.size()); }

    bool operator==(const Scenario&) const = default;
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    int year_length_days = 365;

    int total_days() const;
    /// Common slot count; 0 for an empty set.
    int slot_count() const;
    double delta_t_hours() const;
    /// Longest parking duration departure - arrival over all sessions.
    int max_parked_slots() const;
    std::size_t session_count() const;

    bool operator==(const ScenarioSet&) const = default;
};

/// Switches that shape the assembled MILP without changing the inputs.
struct ModelOptions {
    /// One charge/discharge mode binary per BESS technology instead of one
    /// shared by all technologies.
    bool per_technology_bess_mode = false;
    /// Emit the ordering rows between identical candidate chargers.
    bool symmetry_breaking = true;
    std::size_t max_columns = 5'000'000;
    std::size_t max_rows = 5'000'000;

    bool operator==(const ModelOptions&) const = default;
};

}  // namespace ceh
