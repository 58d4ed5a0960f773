#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ceh/catalog.hpp"
#include "ceh/inputs.hpp"

namespace ceh {

/// Everything the optimizer needs, after validation.
struct ModelInputs {
    TechnologyCatalog catalog;
    ScenarioSet scenarios;
    EconomicParams economics;
    ModelOptions options;
    /// Non-fatal findings (Betz limit, leap year, duration re-rounding).
    std::vector<std::string> warnings;
};

namespace ingest {

enum class DayKind { Weekday, Weekend };

std::string_view to_string(DayKind kind);

/// Weather and grid data of one calendar month, shared by the weekday and
/// weekend scenario of that month.
struct MonthlyProfile {
    int month = 1;  // 1..12
    std::vector<double> irradiance_kw_m2;
    std::vector<double> wind_speed_m_s;
    GridContract grid;
};

struct DemandProfile {
    int month = 1;
    DayKind kind = DayKind::Weekday;
    std::vector<ChargingSession> sessions;
};

/// Reads the config document and every file it references (paths are
/// relative to the config), then validates the result.
ModelInputs load_inputs(const std::filesystem::path& config_path);

/// Writes `inputs` as config.json plus one delimited file per series and
/// per session list into `directory`. Numbers are written in shortest
/// round-trip form, so load_inputs reproduces the inputs bit for bit.
void save_inputs(const ModelInputs& inputs, const std::filesystem::path& directory);

/// Checks every invariant of the inputs. Throws the first violation found
/// and returns the warnings.
std::vector<std::string> validate_inputs(const TechnologyCatalog& catalog, const ScenarioSet& scenarios,
                                         const EconomicParams& economics);

/// Days of the given kind in a month of a Gregorian year.
int count_days(int year, int month, DayKind kind);

/// Pairs each month's weather with its weekday and weekend demand. The
/// occurrence factor of a scenario is the number of such days in the month.
/// Throws CalendarMismatch unless the demand covers all 12 x 2 labels
/// exactly once and weather is given for each month.
ScenarioSet build_scenarios(int year, double delta_t_hours, const std::vector<MonthlyProfile>& weather,
                            const std::vector<DemandProfile>& demand);

std::vector<double> read_series(const std::filesystem::path& path);
std::vector<ChargingSession> read_sessions(const std::filesystem::path& path);
void write_series(const std::filesystem::path& path, const std::vector<double>& values);
void write_sessions(const std::filesystem::path& path, const std::vector<ChargingSession>& sessions);

}  // namespace ingest
}  // namespace ceh
