#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ceh/ingest.hpp"

namespace cehtest {

std::filesystem::path source_dir();
std::filesystem::path tiny_config();
std::filesystem::path case_study_config();

/// Objective of the bundled tiny example, computed once with the
/// enumeration oracle (exact simplex in long double) and frozen here.
inline constexpr double kTinyOracleObjective = 57047.9972385245;

/// Empty directory under the system temp dir, removed and recreated.
std::filesystem::path scratch_dir(const std::string& name);

/// Reproducible across platforms: only the raw engine output is used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1p-53; }
    int integer(int lo, int hi) { return std::min(hi, lo + static_cast<int>(uniform(0.0, 1.0) * (hi - lo + 1))); }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
    double rounded(double lo, double hi, double step);

private:
    std::mt19937_64 engine_;
};

ceh::ModelInputs tiny_example();

/// A day with no sun, no wind, a 1 MW connection and flat prices
/// (buy 0.20, sell 0.05).
ceh::Scenario flat_scenario(const std::string& id, int days, int slots);

ceh::ChargingSession session(const std::string& id, int arrival, int departure, double energy_kwh, double max_rate_kw = 400.0);

ceh::ChargerType charger_type(const std::string& id, double max_power_kw, double invest_cost, int candidates);

/// 580 kWh unit with the case-study parameters.
ceh::BessTechnology case_study_bess();

/// Validates and packs; warnings are kept.
ceh::ModelInputs make_inputs(ceh::TechnologyCatalog catalog, std::vector<ceh::Scenario> scenarios,
                             ceh::ModelOptions options = {});

/// Random instance within the tiny limits: at most 2 scenarios of at most 6
/// slots, 2 vehicles per scenario, 2 candidate chargers, one technology of
/// each generator kind and of storage, every unit cap at most 2.
ceh::ModelInputs random_tiny(std::uint64_t seed);

/// Two hourly days cut from the synthetic case study (12 weekday trucks),
/// two candidates per charger type and at most two storage units;
/// withdrawal limits multiplied by `withdrawal_scale`.
ceh::ModelInputs medium_instance(double withdrawal_scale);

}  // namespace cehtest
