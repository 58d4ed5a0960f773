#include "ceh/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ceh/errors.hpp"
#include "ceh/io.hpp"

namespace ceh::ingest {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(DayKind kind) { return kind == DayKind::Weekday ? "weekday" : "weekend"; }

namespace {

// ---------------------------------------------------------------------------
// Delimited text

std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string where(const fs::path& path, int line) { return path.string() + ":" + std::to_string(line); }

double parse_double(const std::string& text, const fs::path& path, int line, std::string_view column) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw SchemaViolation("SchemaViolation: column '" + std::string(column) + "' at " + where(path, line) +
                              ": '" + text + "' is not a finite number");
    }
    return value;
}

int parse_int(const std::string& text, const fs::path& path, int line, std::string_view column) {
    int value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw SchemaViolation("SchemaViolation: column '" + std::string(column) + "' at " + where(path, line) +
                              ": '" + text + "' is not an integer");
    }
    return value;
}

/// Reads non-empty, non-comment lines; checks the header against `columns`.
std::vector<std::pair<int, std::vector<std::string>>> read_table(const fs::path& path,
                                                                 const std::vector<std::string>& columns) {
    std::ifstream in(path);
    if (!in) throw MissingFile("MissingFile: cannot open '" + path.string() + "'");
    std::vector<std::pair<int, std::vector<std::string>>> rows;
    std::string line;
    int number = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++number;
        const auto content = trim(line);
        if (content.empty() || content.front() == '#') continue;
        auto fields = split_fields(content);
        if (!header_seen) {
            header_seen = true;
            if (fields != columns) {
                std::string expected;
                for (const auto& c : columns) expected += (expected.empty() ? "" : ",") + c;
                throw SchemaViolation("SchemaViolation: header at " + where(path, number) + " must be '" +
                                      expected + "'");
            }
            continue;
        }
        if (fields.size() != columns.size()) {
            throw SchemaViolation("SchemaViolation: expected " + std::to_string(columns.size()) + " fields at " +
                                  where(path, number) + ", got " + std::to_string(fields.size()));
        }
        rows.emplace_back(number, std::move(fields));
    }
    if (!header_seen) throw SchemaViolation("SchemaViolation: '" + path.string() + "' has no header row");
    return rows;
}


// ---------------------------------------------------------------------------
// Config document

class ConfigReader {
public:
    explicit ConfigReader(fs::path base) : base_(std::move(base)) {}

    static void check_keys(const json& obj, const std::string& loc, std::initializer_list<std::string_view> allowed) {
        if (!obj.is_object()) throw SchemaViolation("SchemaViolation: " + loc + " must be an object");
        for (const auto& [key, _] : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                throw SchemaViolation("SchemaViolation: unknown field '" + key + "' at " + loc);
            }
        }
    }

    static double number(const json& obj, const char* key, const std::string& loc) {
        if (!obj.contains(key)) throw SchemaViolation("SchemaViolation: missing field '" + std::string(key) + "' at " + loc);
        const auto& v = obj.at(key);
        if (!v.is_number()) throw SchemaViolation("SchemaViolation: field '" + std::string(key) + "' at " + loc + " must be a number");
        return v.get<double>();
    }

    static double number_or(const json& obj, const char* key, const std::string& loc, double fallback) {
        return obj.contains(key) ? number(obj, key, loc) : fallback;
    }

    static int integer(const json& obj, const char* key, const std::string& loc) {
        if (!obj.contains(key)) throw SchemaViolation("SchemaViolation: missing field '" + std::string(key) + "' at " + loc);
        const auto& v = obj.at(key);
        if (!v.is_number_integer()) throw SchemaViolation("SchemaViolation: field '" + std::string(key) + "' at " + loc + " must be an integer");
        return v.get<int>();
    }

    static int integer_or(const json& obj, const char* key, const std::string& loc, int fallback) {
        return obj.contains(key) ? integer(obj, key, loc) : fallback;
    }

    static std::string text(const json& obj, const char* key, const std::string& loc) {
        if (!obj.contains(key)) throw SchemaViolation("SchemaViolation: missing field '" + std::string(key) + "' at " + loc);
        const auto& v = obj.at(key);
        if (!v.is_string()) throw SchemaViolation("SchemaViolation: field '" + std::string(key) + "' at " + loc + " must be a string");
        return v.get<std::string>();
    }

    static bool boolean_or(const json& obj, const char* key, const std::string& loc, bool fallback) {
        if (!obj.contains(key)) return fallback;
        const auto& v = obj.at(key);
        if (!v.is_boolean()) throw SchemaViolation("SchemaViolation: field '" + std::string(key) + "' at " + loc + " must be a boolean");
        return v.get<bool>();
    }

    /// A series is a file path, an inline array, or a scalar broadcast to every slot.
    std::vector<double> series(const json& obj, const char* key, const std::string& loc, int slots) const {
        if (!obj.contains(key)) throw SchemaViolation("SchemaViolation: missing field '" + std::string(key) + "' at " + loc);
        const auto& v = obj.at(key);
        const auto field_loc = loc + "/" + key;
        if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(slots), v.get<double>());
        if (v.is_string()) return read_series(base_ / v.get<std::string>());
        if (v.is_array()) {
            std::vector<double> out;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number()) throw SchemaViolation("SchemaViolation: " + field_loc + "/" + std::to_string(i) + " must be a number");
                out.push_back(v[i].get<double>());
            }
            return out;
        }
        throw SchemaViolation("SchemaViolation: " + field_loc + " must be a file path, an array, or a number");
    }

    std::vector<ChargingSession> sessions(const json& obj, const std::string& loc) const {
        if (!obj.contains("sessions")) return {};
        const auto& v = obj.at("sessions");
        if (v.is_string()) return read_sessions(base_ / v.get<std::string>());
        if (!v.is_array()) throw SchemaViolation("SchemaViolation: " + loc + "/sessions must be a file path or an array");
        std::vector<ChargingSession> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto item_loc = loc + "/sessions/" + std::to_string(i);
            check_keys(v[i], item_loc, {"vehicle_id", "arrival_slot", "departure_slot", "energy_kwh", "max_rate_kw"});
            ChargingSession s;
            s.vehicle_id = text(v[i], "vehicle_id", item_loc);
            s.arrival_slot = integer(v[i], "arrival_slot", item_loc);
            s.departure_slot = integer(v[i], "departure_slot", item_loc);
            s.energy_kwh = number(v[i], "energy_kwh", item_loc);
            s.max_vehicle_rate_kw = number(v[i], "max_rate_kw", item_loc);
            out.push_back(std::move(s));
        }
        return out;
    }

    GridContract grid(const json& obj, const std::string& loc, int slots) const {
        GridContract g;
        g.withdrawal_limit_kw = series(obj, "withdrawal_limit_kw", loc, slots);
        g.injection_limit_kw = series(obj, "injection_limit_kw", loc, slots);
        g.buy_price = series(obj, "buy_price", loc, slots);
        g.sell_price = series(obj, "sell_price", loc, slots);
        return g;
    }

private:
    fs::path base_;
};

EconomicParams parse_economics(const json& root) {
    EconomicParams e;
    if (!root.contains("economics")) throw SchemaViolation("SchemaViolation: missing field 'economics' at /");
    const auto& j = root.at("economics");
    const std::string loc = "/economics";
    ConfigReader::check_keys(j, loc, {"discount_rate", "maintenance_fraction", "lifetimes_years"});
    e.discount_rate = ConfigReader::number(j, "discount_rate", loc);
    e.maintenance_fraction = ConfigReader::number_or(j, "maintenance_fraction", loc, e.maintenance_fraction);
    if (j.contains("lifetimes_years")) {
        const auto& l = j.at("lifetimes_years");
        const auto lloc = loc + "/lifetimes_years";
        ConfigReader::check_keys(l, lloc, {"pv", "wt", "bess", "charger"});
        for (auto asset : kAssetClasses) {
            const std::string key(to_string(asset));
            auto& slot = e.lifetimes_years[static_cast<std::size_t>(asset)];
            slot = ConfigReader::number_or(l, key.c_str(), lloc, slot);
        }
    }
    return e;
}

double maintenance(const json& j, const std::string& loc, double invest, const EconomicParams& e) {
    return ConfigReader::number_or(j, "maintenance_cost", loc, invest * e.maintenance_fraction);
}

const json& array_field(const json& obj, const char* key, const std::string& loc) {
    static const json empty = json::array();
    if (!obj.contains(key)) return empty;
    const auto& v = obj.at(key);
    if (!v.is_array()) throw SchemaViolation("SchemaViolation: " + loc + "/" + key + " must be an array");
    return v;
}

TechnologyCatalog parse_catalog(const json& root, const EconomicParams& e) {
    TechnologyCatalog cat;
    if (!root.contains("technologies")) throw SchemaViolation("SchemaViolation: missing field 'technologies' at /");
    const auto& t = root.at("technologies");
    ConfigReader::check_keys(t, "/technologies", {"pv", "wt", "bess", "chargers"});
    using R = ConfigReader;

    const auto& pv = array_field(t, "pv", "/technologies");
    for (std::size_t i = 0; i < pv.size(); ++i) {
        const auto loc = "/technologies/pv/" + std::to_string(i);
        R::check_keys(pv[i], loc, {"id", "efficiency", "area_m2", "invest_cost", "maintenance_cost", "lifetime_years", "max_units"});
        PvTechnology p;
        p.id = R::text(pv[i], "id", loc);
        p.efficiency = R::number(pv[i], "efficiency", loc);
        p.area_m2 = R::number(pv[i], "area_m2", loc);
        p.invest_cost = R::number(pv[i], "invest_cost", loc);
        p.maintenance_cost = maintenance(pv[i], loc, p.invest_cost, e);
        p.lifetime_years = R::number_or(pv[i], "lifetime_years", loc, e.lifetime(AssetClass::Pv));
        p.max_units = R::integer_or(pv[i], "max_units", loc, p.max_units);
        cat.pv.push_back(std::move(p));
    }

    const auto& wt = array_field(t, "wt", "/technologies");
    for (std::size_t i = 0; i < wt.size(); ++i) {
        const auto loc = "/technologies/wt/" + std::to_string(i);
        R::check_keys(wt[i], loc, {"id", "cut_in_m_s", "rated_speed_m_s", "cut_out_m_s", "rated_power_kw", "swept_area_m2",
                                   "air_density_kg_m3", "hub_height_m", "measurement_height_m", "shear_exponent",
                                   "invest_cost", "maintenance_cost", "lifetime_years", "max_units"});
        WtTechnology w;
        w.id = R::text(wt[i], "id", loc);
        w.cut_in_m_s = R::number(wt[i], "cut_in_m_s", loc);
        w.rated_speed_m_s = R::number(wt[i], "rated_speed_m_s", loc);
        w.cut_out_m_s = R::number(wt[i], "cut_out_m_s", loc);
        w.rated_power_kw = R::number(wt[i], "rated_power_kw", loc);
        w.swept_area_m2 = R::number(wt[i], "swept_area_m2", loc);
        w.air_density_kg_m3 = R::number_or(wt[i], "air_density_kg_m3", loc, w.air_density_kg_m3);
        w.hub_height_m = R::number(wt[i], "hub_height_m", loc);
        w.measurement_height_m = R::number_or(wt[i], "measurement_height_m", loc, w.measurement_height_m);
        w.shear_exponent = R::number_or(wt[i], "shear_exponent", loc, w.shear_exponent);
        w.invest_cost = R::number(wt[i], "invest_cost", loc);
        w.maintenance_cost = maintenance(wt[i], loc, w.invest_cost, e);
        w.lifetime_years = R::number_or(wt[i], "lifetime_years", loc, e.lifetime(AssetClass::Wt));
        w.max_units = R::integer_or(wt[i], "max_units", loc, w.max_units);
        cat.wt.push_back(std::move(w));
    }

    const auto& bess = array_field(t, "bess", "/technologies");
    for (std::size_t i = 0; i < bess.size(); ++i) {
        const auto loc = "/technologies/bess/" + std::to_string(i);
        R::check_keys(bess[i], loc, {"id", "unit_size_kwh", "charge_eff", "discharge_eff", "self_discharge_per_h",
                                     "soc_min_frac", "soc_max_frac", "soc_init_frac", "max_charge_kw",
                                     "max_discharge_kw", "max_units", "invest_cost", "maintenance_cost",
                                     "degradation_cost_per_kw", "lifetime_years"});
        BessTechnology b;
        b.id = R::text(bess[i], "id", loc);
        b.unit_size_kwh = R::number(bess[i], "unit_size_kwh", loc);
        b.charge_eff = R::number(bess[i], "charge_eff", loc);
        b.discharge_eff = R::number(bess[i], "discharge_eff", loc);
        b.self_discharge_per_h = R::number(bess[i], "self_discharge_per_h", loc);
        b.soc_min_frac = R::number(bess[i], "soc_min_frac", loc);
        b.soc_max_frac = R::number(bess[i], "soc_max_frac", loc);
        b.soc_init_frac = R::number(bess[i], "soc_init_frac", loc);
        b.max_charge_kw = R::number(bess[i], "max_charge_kw", loc);
        b.max_discharge_kw = R::number(bess[i], "max_discharge_kw", loc);
        b.max_units = R::integer(bess[i], "max_units", loc);
        b.invest_cost = R::number(bess[i], "invest_cost", loc);
        b.maintenance_cost = maintenance(bess[i], loc, b.invest_cost, e);
        b.degradation_cost_per_kw = R::number_or(bess[i], "degradation_cost_per_kw", loc, 0.0);
        b.lifetime_years = R::number_or(bess[i], "lifetime_years", loc, e.lifetime(AssetClass::Bess));
        cat.bess.push_back(std::move(b));
    }

    const auto& ch = array_field(t, "chargers", "/technologies");
    for (std::size_t i = 0; i < ch.size(); ++i) {
        const auto loc = "/technologies/chargers/" + std::to_string(i);
        R::check_keys(ch[i], loc, {"id", "max_power_kw", "invest_cost", "maintenance_cost", "candidate_count", "lifetime_years"});
        ChargerType c;
        c.id = R::text(ch[i], "id", loc);
        c.max_power_kw = R::number(ch[i], "max_power_kw", loc);
        c.invest_cost = R::number(ch[i], "invest_cost", loc);
        c.maintenance_cost = maintenance(ch[i], loc, c.invest_cost, e);
        c.candidate_count = R::integer(ch[i], "candidate_count", loc);
        c.lifetime_years = R::number_or(ch[i], "lifetime_years", loc, e.lifetime(AssetClass::Charger));
        cat.chargers.push_back(std::move(c));
    }
    return cat;
}

ModelOptions parse_options(const json& root) {
    ModelOptions o;
    if (!root.contains("model_options")) return o;
    const auto& j = root.at("model_options");
    const std::string loc = "/model_options";
    ConfigReader::check_keys(j, loc, {"per_technology_bess_mode", "symmetry_breaking", "max_columns", "max_rows"});
    o.per_technology_bess_mode = ConfigReader::boolean_or(j, "per_technology_bess_mode", loc, o.per_technology_bess_mode);
    o.symmetry_breaking = ConfigReader::boolean_or(j, "symmetry_breaking", loc, o.symmetry_breaking);
    if (j.contains("max_columns")) o.max_columns = j.at("max_columns").get<std::size_t>();
    if (j.contains("max_rows")) o.max_rows = j.at("max_rows").get<std::size_t>();
    return o;
}

int slots_for(double delta_t) {
    if (!(delta_t > 0.0)) throw InvariantViolation("InvariantViolation: delta_t_hours must be positive");
    const double slots = 24.0 / delta_t;
    const double nearest = std::round(slots);
    if (std::abs(slots - nearest) > 1e-9) {
        throw InvariantViolation("InvariantViolation: delta_t_hours = " + fmt::format("{}", delta_t) +
                                 " does not divide a 24 h day into whole slots");
    }
    return static_cast<int>(nearest);
}

ScenarioSet parse_explicit_scenarios(const json& arr, const ConfigReader& reader, double delta_t) {
    ScenarioSet set;
    const int slots = slots_for(delta_t);
    if (!arr.is_array()) throw SchemaViolation("SchemaViolation: /scenarios must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto loc = "/scenarios/" + std::to_string(i);
        const auto& j = arr[i];
        ConfigReader::check_keys(j, loc, {"id", "occurrence_days", "irradiance", "wind_speed", "withdrawal_limit_kw",
                                          "injection_limit_kw", "buy_price", "sell_price", "sessions"});
        Scenario s;
        s.id = ConfigReader::text(j, "id", loc);
        s.occurrence_days = ConfigReader::integer(j, "occurrence_days", loc);
        s.delta_t_hours = delta_t;
        s.irradiance_kw_m2 = reader.series(j, "irradiance", loc, slots);
        s.wind_speed_m_s = reader.series(j, "wind_speed", loc, slots);
        s.grid = reader.grid(j, loc, slots);
        s.sessions = reader.sessions(j, loc);
        set.scenarios.push_back(std::move(s));
    }
    return set;
}

ScenarioSet parse_calendar(const json& cal, const ConfigReader& reader, double delta_t) {
    const std::string loc = "/calendar";
    ConfigReader::check_keys(cal, loc, {"year", "months", "demand"});
    const int year = ConfigReader::integer(cal, "year", loc);
    const int slots = slots_for(delta_t);

    std::vector<MonthlyProfile> weather;
    const auto& months = array_field(cal, "months", loc);
    for (std::size_t i = 0; i < months.size(); ++i) {
        const auto mloc = loc + "/months/" + std::to_string(i);
        ConfigReader::check_keys(months[i], mloc, {"month", "irradiance", "wind_speed", "withdrawal_limit_kw",
                                                   "injection_limit_kw", "buy_price", "sell_price"});
        MonthlyProfile m;
        m.month = ConfigReader::integer(months[i], "month", mloc);
        m.irradiance_kw_m2 = reader.series(months[i], "irradiance", mloc, slots);
        m.wind_speed_m_s = reader.series(months[i], "wind_speed", mloc, slots);
        m.grid = reader.grid(months[i], mloc, slots);
        weather.push_back(std::move(m));
    }

    std::vector<DemandProfile> demand;
    const auto& dem = array_field(cal, "demand", loc);
    for (std::size_t i = 0; i < dem.size(); ++i) {
        const auto dloc = loc + "/demand/" + std::to_string(i);
        ConfigReader::check_keys(dem[i], dloc, {"month", "day_kind", "sessions"});
        DemandProfile d;
        d.month = ConfigReader::integer(dem[i], "month", dloc);
        const auto kind = ConfigReader::text(dem[i], "day_kind", dloc);
        if (kind == "weekday") {
            d.kind = DayKind::Weekday;
        } else if (kind == "weekend") {
            d.kind = DayKind::Weekend;
        } else {
            throw SchemaViolation("SchemaViolation: " + dloc + "/day_kind must be 'weekday' or 'weekend'");
        }
        d.sessions = reader.sessions(dem[i], dloc);
        demand.push_back(std::move(d));
    }
    return build_scenarios(year, delta_t, weather, demand);
}

// ---------------------------------------------------------------------------
// Validation

[[noreturn]] void violation(const std::string& what) { throw InvariantViolation("InvariantViolation: " + what); }

void check_series(const Scenario& s, const std::vector<double>& values, std::string_view name, int slots,
                  bool non_negative) {
    if (static_cast<int>(values.size()) != slots) {
        violation(fmt::format("scenario '{}': series '{}' has {} values, expected {}", s.id, name, values.size(), slots));
    }
    for (int t = 0; t < slots; ++t) {
        const double v = values[static_cast<std::size_t>(t)];
        if (!std::isfinite(v)) violation(fmt::format("scenario '{}' slot {}: {} is not finite", s.id, t + 1, name));
        if (non_negative && v < 0.0) violation(fmt::format("scenario '{}' slot {}: {} = {} is negative", s.id, t + 1, name, v));
    }
}

template <class T>
void check_unique_ids(const std::vector<T>& items, std::string_view what) {
    std::set<std::string> seen;
    for (const auto& it : items) {
        if (!seen.insert(it.id).second) throw SchemaViolation(fmt::format("SchemaViolation: duplicate {} id '{}'", what, it.id));
    }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> read_series(const fs::path& path) {
    const auto rows = read_table(path, {"slot", "value"});
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& [line, fields] : rows) {
        const int slot = parse_int(fields[0], path, line, "slot");
        if (slot != static_cast<int>(values.size()) + 1) {
            throw SchemaViolation("SchemaViolation: slot at " + where(path, line) + " must be " +
                                  std::to_string(values.size() + 1) + " (slots are consecutive and 1-based)");
        }
        values.push_back(parse_double(fields[1], path, line, "value"));
    }
    return values;
}

std::vector<ChargingSession> read_sessions(const fs::path& path) {
    const auto rows = read_table(path, {"vehicle_id", "arrival_slot", "departure_slot", "energy_kwh", "max_rate_kw"});
    std::vector<ChargingSession> out;
    out.reserve(rows.size());
    for (const auto& [line, f] : rows) {
        ChargingSession s;
        s.vehicle_id = f[0];
        if (s.vehicle_id.empty()) throw SchemaViolation("SchemaViolation: empty vehicle_id at " + where(path, line));
        s.arrival_slot = parse_int(f[1], path, line, "arrival_slot");
        s.departure_slot = parse_int(f[2], path, line, "departure_slot");
        s.energy_kwh = parse_double(f[3], path, line, "energy_kwh");
        s.max_vehicle_rate_kw = parse_double(f[4], path, line, "max_rate_kw");
        out.push_back(std::move(s));
    }
    return out;
}

void write_series(const fs::path& path, const std::vector<double>& values) {
    std::string text = "slot,value\n";
    for (std::size_t t = 0; t < values.size(); ++t) text += fmt::format("{},{}\n", t + 1, values[t]);
    write_text_atomically(path, text);
}

void write_sessions(const fs::path& path, const std::vector<ChargingSession>& sessions) {
    std::string text = "vehicle_id,arrival_slot,departure_slot,energy_kwh,max_rate_kw\n";
    for (const auto& s : sessions) {
        text += fmt::format("{},{},{},{},{}\n", s.vehicle_id, s.arrival_slot, s.departure_slot, s.energy_kwh,
                            s.max_vehicle_rate_kw);
    }
    write_text_atomically(path, text);
}

int count_days(int year, int month, DayKind kind) {
    using namespace std::chrono;
    if (month < 1 || month > 12) throw CalendarMismatch("CalendarMismatch: month " + std::to_string(month) + " out of range");
    const sys_days first = std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} / 1;
    const sys_days last = std::chrono::year{year} / std::chrono::month{static_cast<unsigned>(month)} / std::chrono::last;
    int n = 0;
    for (sys_days d = first; d <= last; d += days{1}) {
        const auto wd = weekday{d}.c_encoding();  // 0 = Sunday
        const bool weekend = wd == 0 || wd == 6;
        if (weekend == (kind == DayKind::Weekend)) ++n;
    }
    return n;
}

ScenarioSet build_scenarios(int year, double delta_t_hours, const std::vector<MonthlyProfile>& weather,
                            const std::vector<DemandProfile>& demand) {
    std::map<int, const MonthlyProfile*> by_month;
    for (const auto& m : weather) {
        if (m.month < 1 || m.month > 12) throw CalendarMismatch(fmt::format("CalendarMismatch: weather month {} out of range", m.month));
        if (!by_month.emplace(m.month, &m).second) throw CalendarMismatch(fmt::format("CalendarMismatch: duplicate weather profile for month {}", m.month));
    }
    if (by_month.size() != 12) {
        throw CalendarMismatch(fmt::format("CalendarMismatch: need 12 monthly weather profiles, got {}", by_month.size()));
    }

    std::map<std::pair<int, DayKind>, const DemandProfile*> labels;
    for (const auto& d : demand) {
        if (d.month < 1 || d.month > 12) throw CalendarMismatch(fmt::format("CalendarMismatch: demand month {} out of range", d.month));
        if (!labels.emplace(std::pair{d.month, d.kind}, &d).second) {
            throw CalendarMismatch(fmt::format("CalendarMismatch: duplicate demand profile ({}, {})", d.month, to_string(d.kind)));
        }
    }
    if (labels.size() != 24) {
        std::string missing;
        for (int m = 1; m <= 12; ++m)
            for (auto k : {DayKind::Weekday, DayKind::Weekend})
                if (!labels.count({m, k})) missing += fmt::format(" ({}, {})", m, to_string(k));
        throw CalendarMismatch(fmt::format("CalendarMismatch: need 24 demand profiles (12 months x weekday/weekend), got {}; missing:{}",
                                           labels.size(), missing));
    }

    ScenarioSet set;
    const bool leap = std::chrono::year{year}.is_leap();
    set.year_length_days = leap ? 366 : 365;
    for (int m = 1; m <= 12; ++m) {
        for (auto kind : {DayKind::Weekday, DayKind::Weekend}) {
            const auto& w = *by_month.at(m);
            Scenario s;
            s.id = fmt::format("{:04}-{:02}-{}", year, m, to_string(kind));
            s.occurrence_days = count_days(year, m, kind);
            s.delta_t_hours = delta_t_hours;
            s.irradiance_kw_m2 = w.irradiance_kw_m2;
            s.wind_speed_m_s = w.wind_speed_m_s;
            s.grid = w.grid;
            s.sessions = labels.at({m, kind})->sessions;
            set.scenarios.push_back(std::move(s));
        }
    }
    return set;
}

std::vector<std::string> validate_inputs(const TechnologyCatalog& catalog, const ScenarioSet& scenarios,
                                         const EconomicParams& economics) {
    std::vector<std::string> warnings;

    if (!(economics.discount_rate > 0.0)) violation("economics: discount_rate must be positive");
    for (auto asset : kAssetClasses) {
        if (!(economics.lifetime(asset) >= 1.0)) violation(fmt::format("economics: {} lifetime must be at least 1 year", to_string(asset)));
    }
    if (!(economics.maintenance_fraction >= 0.0)) violation("economics: maintenance_fraction must be non-negative");

    check_unique_ids(catalog.pv, "pv");
    check_unique_ids(catalog.wt, "wt");
    check_unique_ids(catalog.bess, "bess");
    check_unique_ids(catalog.chargers, "charger");

    for (const auto& p : catalog.pv) {
        if (!(p.efficiency > 0.0 && p.efficiency <= 1.0)) violation("pv '" + p.id + "': efficiency must lie in (0, 1]");
        if (!(p.area_m2 > 0.0)) violation("pv '" + p.id + "': area must be positive");
        if (!(p.invest_cost >= 0.0 && p.maintenance_cost >= 0.0)) violation("pv '" + p.id + "': costs must be non-negative");
        if (!(p.lifetime_years >= 1.0)) violation("pv '" + p.id + "': lifetime must be at least 1 year");
        if (p.max_units < 0) violation("pv '" + p.id + "': max_units must be non-negative");
    }
    for (const auto& w : catalog.wt) {
        if (!(w.cut_in_m_s > 0.0 && w.cut_in_m_s < w.rated_speed_m_s && w.rated_speed_m_s <= w.cut_out_m_s)) {
            violation("wt '" + w.id + "': need 0 < cut_in < rated_speed <= cut_out");
        }
        if (!(w.rated_power_kw > 0.0)) violation("wt '" + w.id + "': rated power must be positive");
        if (!(w.swept_area_m2 > 0.0 && w.air_density_kg_m3 > 0.0)) violation("wt '" + w.id + "': swept area and air density must be positive");
        if (!(w.hub_height_m > 0.0 && w.measurement_height_m > 0.0)) violation("wt '" + w.id + "': heights must be positive");
        if (!(w.shear_exponent > 0.0)) violation("wt '" + w.id + "': shear exponent must be positive");
        const double cw = w.efficiency_coefficient();
        if (!(cw > 0.0 && cw <= 1.0)) violation(fmt::format("wt '{}': efficiency coefficient {} outside (0, 1]", w.id, cw));
        if (cw > kBetzLimit) warnings.push_back(fmt::format("wt '{}': efficiency coefficient {:.4f} exceeds the Betz limit {:.4f}", w.id, cw, kBetzLimit));
        if (!(w.invest_cost >= 0.0 && w.maintenance_cost >= 0.0)) violation("wt '" + w.id + "': costs must be non-negative");
        if (!(w.lifetime_years >= 1.0)) violation("wt '" + w.id + "': lifetime must be at least 1 year");
        if (w.max_units < 0) violation("wt '" + w.id + "': max_units must be non-negative");
    }
    for (const auto& b : catalog.bess) {
        if (!(0.0 <= b.soc_min_frac && b.soc_min_frac <= b.soc_init_frac && b.soc_init_frac <= b.soc_max_frac && b.soc_max_frac <= 1.0)) {
            violation("bess '" + b.id + "': need 0 <= soc_min <= soc_init <= soc_max <= 1");
        }
        if (!(b.charge_eff > 0.0 && b.charge_eff <= 1.0 && b.discharge_eff > 0.0 && b.discharge_eff <= 1.0)) {
            violation("bess '" + b.id + "': efficiencies must lie in (0, 1]");
        }
        if (!(b.self_discharge_per_h >= 0.0)) violation("bess '" + b.id + "': self discharge must be non-negative");
        if (b.max_units < 1) violation("bess '" + b.id + "': max_units must be at least 1");
        if (!(b.unit_size_kwh > 0.0)) violation("bess '" + b.id + "': unit size must be positive");
        if (!(b.max_charge_kw >= 0.0 && b.max_discharge_kw >= 0.0)) violation("bess '" + b.id + "': power limits must be non-negative");
        if (!(b.invest_cost >= 0.0 && b.maintenance_cost >= 0.0 && b.degradation_cost_per_kw >= 0.0)) {
            violation("bess '" + b.id + "': costs must be non-negative");
        }
        if (!(b.lifetime_years >= 1.0)) violation("bess '" + b.id + "': lifetime must be at least 1 year");
    }
    for (const auto& c : catalog.chargers) {
        if (!(c.max_power_kw > 0.0)) violation("charger '" + c.id + "': max power must be positive");
        if (c.candidate_count < 1) violation("charger '" + c.id + "': candidate_count must be at least 1");
        if (!(c.invest_cost >= 0.0 && c.maintenance_cost >= 0.0)) violation("charger '" + c.id + "': costs must be non-negative");
        if (!(c.lifetime_years >= 1.0)) violation("charger '" + c.id + "': lifetime must be at least 1 year");
    }

    if (scenarios.year_length_days != 365 && scenarios.year_length_days != 366) {
        violation(fmt::format("year_length_days must be 365 or 366, got {}", scenarios.year_length_days));
    }
    if (scenarios.year_length_days == 366) warnings.push_back("year length is 366 days (leap year)");

    check_unique_ids(scenarios.scenarios, "scenario");
    const int slots = scenarios.slot_count();
    const double dt = scenarios.delta_t_hours();
    for (const auto& s : scenarios.scenarios) {
        if (s.delta_t_hours != dt) violation("scenario '" + s.id + "': all scenarios must share delta_t");
        if (s.slot_count() != slots) violation("scenario '" + s.id + "': all scenarios must share the slot count");
        if (!(dt > 0.0) || std::abs(slots * dt - 24.0) > 1e-9) {
            violation(fmt::format("scenario '{}': {} slots x {} h does not cover 24 h", s.id, slots, dt));
        }
        if (s.occurrence_days < 0) violation("scenario '" + s.id + "': occurrence_days must be non-negative");
        check_series(s, s.irradiance_kw_m2, "irradiance", slots, true);
        check_series(s, s.wind_speed_m_s, "wind_speed", slots, true);
        check_series(s, s.grid.withdrawal_limit_kw, "withdrawal_limit_kw", slots, true);
        check_series(s, s.grid.injection_limit_kw, "injection_limit_kw", slots, true);
        check_series(s, s.grid.buy_price, "buy_price", slots, false);
        check_series(s, s.grid.sell_price, "sell_price", slots, false);
        for (int t = 0; t < slots; ++t) {
            const double buy = s.grid.buy_price[static_cast<std::size_t>(t)];
            const double sell = s.grid.sell_price[static_cast<std::size_t>(t)];
            if (!(buy > sell)) {
                violation(fmt::format("scenario '{}' slot {}: sell price {} must be below buy price {}", s.id, t + 1, sell, buy));
            }
        }

        std::set<std::string> vehicles;
        for (const auto& v : s.sessions) {
            if (!vehicles.insert(v.vehicle_id).second) {
                throw SchemaViolation("SchemaViolation: scenario '" + s.id + "': duplicate vehicle id '" + v.vehicle_id + "'");
            }
            if (!(v.arrival_slot >= 1 && v.arrival_slot < v.departure_slot && v.departure_slot <= slots)) {
                throw SessionWindowError(fmt::format(
                    "SessionWindowError: scenario '{}' vehicle '{}': need 1 <= arrival ({}) < departure ({}) <= {}",
                    s.id, v.vehicle_id, v.arrival_slot, v.departure_slot, slots));
            }
            if (!(v.energy_kwh > 0.0)) violation("scenario '" + s.id + "' vehicle '" + v.vehicle_id + "': energy must be positive");
            if (!(v.max_vehicle_rate_kw > 0.0)) violation("scenario '" + s.id + "' vehicle '" + v.vehicle_id + "': max rate must be positive");
            for (const auto& c : catalog.chargers) {
                if (catalog::duration_needs_extra_rounding(v, c, dt)) {
                    warnings.push_back(fmt::format("scenario '{}' vehicle '{}' on charger '{}': charging time is not a whole number of slots; rounded up",
                                                   s.id, v.vehicle_id, c.id));
                }
            }
        }
        if (!s.sessions.empty() && catalog.chargers.empty()) {
            violation("scenario '" + s.id + "' has charging sessions but the catalog lists no charger type");
        }
    }
    if (scenarios.total_days() != scenarios.year_length_days) {
        violation(fmt::format("occurrence factors sum to {} days, expected {}", scenarios.total_days(), scenarios.year_length_days));
    }
    return warnings;
}

ModelInputs load_inputs(const fs::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw MissingFile("MissingFile: cannot open config '" + config_path.string() + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaViolation("SchemaViolation: " + config_path.string() + " is not valid JSON: " + e.what());
    }
    ConfigReader::check_keys(root, "/", {"delta_t_hours", "year_length_days", "economics", "technologies", "scenarios",
                                         "calendar", "model_options", "description"});

    ModelInputs inputs;
    try {
        const ConfigReader reader(config_path.parent_path());
        inputs.economics = parse_economics(root);
        inputs.catalog = parse_catalog(root, inputs.economics);
        inputs.options = parse_options(root);
        const double dt = ConfigReader::number_or(root, "delta_t_hours", "/", 1.0);
        if (root.contains("scenarios") == root.contains("calendar")) {
            throw SchemaViolation("SchemaViolation: exactly one of 'scenarios' or 'calendar' must be given at /");
        }
        if (root.contains("calendar")) {
            inputs.scenarios = parse_calendar(root.at("calendar"), reader, dt);
        } else {
            inputs.scenarios = parse_explicit_scenarios(root.at("scenarios"), reader, dt);
        }
        inputs.scenarios.year_length_days =
            ConfigReader::integer_or(root, "year_length_days", "/", inputs.scenarios.year_length_days);
    } catch (const json::exception& e) {
        throw SchemaViolation(std::string("SchemaViolation: ") + e.what());
    }
    inputs.warnings = validate_inputs(inputs.catalog, inputs.scenarios, inputs.economics);
    return inputs;
}

void save_inputs(const ModelInputs& inputs, const fs::path& directory) {
    std::error_code ec;
    fs::create_directories(directory / "series", ec);
    fs::create_directories(directory / "sessions", ec);
    if (ec) throw IoError("IoError: cannot create '" + directory.string() + "': " + ec.message());

    json root;
    const auto& sc = inputs.scenarios;
    root["delta_t_hours"] = sc.delta_t_hours();
    root["year_length_days"] = sc.year_length_days;
    const auto& e = inputs.economics;
    root["economics"] = {{"discount_rate", e.discount_rate},
                         {"maintenance_fraction", e.maintenance_fraction},
                         {"lifetimes_years", {{"pv", e.lifetime(AssetClass::Pv)},
                                              {"wt", e.lifetime(AssetClass::Wt)},
                                              {"bess", e.lifetime(AssetClass::Bess)},
                                              {"charger", e.lifetime(AssetClass::Charger)}}}};
    json tech = {{"pv", json::array()}, {"wt", json::array()}, {"bess", json::array()}, {"chargers", json::array()}};
    for (const auto& p : inputs.catalog.pv) {
        tech["pv"].push_back({{"id", p.id}, {"efficiency", p.efficiency}, {"area_m2", p.area_m2},
                              {"invest_cost", p.invest_cost}, {"maintenance_cost", p.maintenance_cost},
                              {"lifetime_years", p.lifetime_years}, {"max_units", p.max_units}});
    }
    for (const auto& w : inputs.catalog.wt) {
        tech["wt"].push_back({{"id", w.id}, {"cut_in_m_s", w.cut_in_m_s}, {"rated_speed_m_s", w.rated_speed_m_s},
                              {"cut_out_m_s", w.cut_out_m_s}, {"rated_power_kw", w.rated_power_kw},
                              {"swept_area_m2", w.swept_area_m2}, {"air_density_kg_m3", w.air_density_kg_m3},
                              {"hub_height_m", w.hub_height_m}, {"measurement_height_m", w.measurement_height_m},
                              {"shear_exponent", w.shear_exponent}, {"invest_cost", w.invest_cost},
                              {"maintenance_cost", w.maintenance_cost}, {"lifetime_years", w.lifetime_years},
                              {"max_units", w.max_units}});
    }
    for (const auto& b : inputs.catalog.bess) {
        tech["bess"].push_back({{"id", b.id}, {"unit_size_kwh", b.unit_size_kwh}, {"charge_eff", b.charge_eff},
                                {"discharge_eff", b.discharge_eff}, {"self_discharge_per_h", b.self_discharge_per_h},
                                {"soc_min_frac", b.soc_min_frac}, {"soc_max_frac", b.soc_max_frac},
                                {"soc_init_frac", b.soc_init_frac}, {"max_charge_kw", b.max_charge_kw},
                                {"max_discharge_kw", b.max_discharge_kw}, {"max_units", b.max_units},
                                {"invest_cost", b.invest_cost}, {"maintenance_cost", b.maintenance_cost},
                                {"degradation_cost_per_kw", b.degradation_cost_per_kw},
                                {"lifetime_years", b.lifetime_years}});
    }
    for (const auto& c : inputs.catalog.chargers) {
        tech["chargers"].push_back({{"id", c.id}, {"max_power_kw", c.max_power_kw}, {"invest_cost", c.invest_cost},
                                    {"maintenance_cost", c.maintenance_cost}, {"candidate_count", c.candidate_count},
                                    {"lifetime_years", c.lifetime_years}});
    }
    root["technologies"] = tech;
    const auto& o = inputs.options;
    root["model_options"] = {{"per_technology_bess_mode", o.per_technology_bess_mode},
                             {"symmetry_breaking", o.symmetry_breaking},
                             {"max_columns", o.max_columns},
                             {"max_rows", o.max_rows}};

    json scenarios = json::array();
    for (std::size_t i = 0; i < sc.scenarios.size(); ++i) {
        const auto& s = sc.scenarios[i];
        const auto stem = fmt::format("s{:03}", i);
        auto series_file = [&](std::string_view name, const std::vector<double>& values) {
            const auto rel = fmt::format("series/{}_{}.csv", stem, name);
            write_series(directory / rel, values);
            return rel;
        };
        json j;
        j["id"] = s.id;
        j["occurrence_days"] = s.occurrence_days;
        j["irradiance"] = series_file("irradiance", s.irradiance_kw_m2);
        j["wind_speed"] = series_file("wind_speed", s.wind_speed_m_s);
        j["withdrawal_limit_kw"] = series_file("withdrawal_limit", s.grid.withdrawal_limit_kw);
        j["injection_limit_kw"] = series_file("injection_limit", s.grid.injection_limit_kw);
        j["buy_price"] = series_file("buy_price", s.grid.buy_price);
        j["sell_price"] = series_file("sell_price", s.grid.sell_price);
        const auto sessions_rel = fmt::format("sessions/{}.csv", stem);
        write_sessions(directory / sessions_rel, s.sessions);
        j["sessions"] = sessions_rel;
        scenarios.push_back(std::move(j));
    }
    root["scenarios"] = scenarios;
    write_text_atomically(directory / "config.json", root.dump(2) + "\n");
}

}  // namespace ceh::ingest
