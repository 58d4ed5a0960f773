#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "ceh/errors.hpp"
#include "ceh/ingest.hpp"
#include "ceh/synthetic.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace ceh;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json tiny_json() {
    std::ifstream in(cehtest::tiny_config());
    return json::parse(in);
}

fs::path write_config(const std::string& name, const json& j) {
    const auto dir = cehtest::scratch_dir(name);
    std::ofstream(dir / "config.json") << j.dump(2);
    return dir / "config.json";
}

ModelInputs load(const std::string& name, const json& j) { return ingest::load_inputs(write_config(name, j)); }

json calendar_json(int year, int demand_profiles) {
    json j = tiny_json();
    j.erase("scenarios");
    j["delta_t_hours"] = 4.0;
    json months = json::array();
    for (int m = 1; m <= 12; ++m) {
        months.push_back({{"month", m}, {"irradiance", 0.1 * (m % 5)}, {"wind_speed", 5.0}, {"withdrawal_limit_kw", 400.0},
                          {"injection_limit_kw", 100.0}, {"buy_price", 0.2}, {"sell_price", 0.05}});
    }
    json demand = json::array();
    int n = 0;
    for (int m = 1; m <= 12; ++m) {
        for (const char* kind : {"weekday", "weekend"}) {
            if (n++ >= demand_profiles) break;
            json sessions = json::array();
            if (std::string(kind) == "weekday") {
                sessions.push_back({{"vehicle_id", "t1"}, {"arrival_slot", 2}, {"departure_slot", 4}, {"energy_kwh", 200.0}, {"max_rate_kw", 150.0}});
            }
            demand.push_back({{"month", m}, {"day_kind", kind}, {"sessions", sessions}});
        }
    }
    j["calendar"] = {{"year", year}, {"months", months}, {"demand", demand}};
    return j;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("bundled tiny example loads") {
    const auto in = cehtest::tiny_example();
    CHECK(in.scenarios.scenarios.size() == 2);
    CHECK(in.scenarios.slot_count() == 6);
    CHECK(in.scenarios.delta_t_hours() == 4.0);
    CHECK(in.scenarios.total_days() == 365);
    CHECK(in.scenarios.session_count() == 3);
    CHECK(in.catalog.candidate_count() == 2);
    // scalar series broadcast to every slot
    CHECK(in.scenarios.scenarios[1].grid.withdrawal_limit_kw == std::vector<double>(6, 200.0));
    CHECK(in.scenarios.scenarios[0].wind_speed_m_s == std::vector<double>(6, 0.0));
    // maintenance defaults to the fraction of invest cost
    CHECK(in.catalog.pv[0].maintenance_cost == doctest::Approx(450.0));
    CHECK(in.catalog.chargers[0].maintenance_cost == doctest::Approx(400.0));
}

TEST_CASE("save and load reproduce the inputs exactly") {
    for (const auto& original : {cehtest::tiny_example(), synthetic::case_study({2023, 14, 6, 3})}) {
        const auto dir = cehtest::scratch_dir("roundtrip");
        ingest::save_inputs(original, dir);
        const auto again = ingest::load_inputs(dir / "config.json");
        CHECK(again.catalog == original.catalog);
        CHECK(again.scenarios == original.scenarios);
        CHECK(again.economics == original.economics);
        CHECK(again.options == original.options);
    }
}

TEST_CASE("hourly 24-scenario config") {
    const auto dir = cehtest::scratch_dir("hourly");
    ingest::save_inputs(synthetic::case_study({2023, 14, 6, 1}), dir);
    const auto in = ingest::load_inputs(dir / "config.json");
    CHECK(in.scenarios.scenarios.size() == 24);
    CHECK(in.scenarios.slot_count() == 24);
    CHECK(in.scenarios.total_days() == 365);
    CHECK(in.warnings.empty());
}

TEST_CASE("leap years load with a warning") {
    const auto in = ingest::load_inputs(cehtest::case_study_config());
    CHECK(in.scenarios.total_days() == 366);
    REQUIRE(in.warnings.size() == 1);
    CHECK(in.warnings[0].find("366") != std::string::npos);
}

TEST_CASE("demand-free hub is valid") {
    json j = tiny_json();
    for (auto& s : j["scenarios"]) s["sessions"] = json::array();
    const auto in = load("nodemand", j);
    CHECK(in.scenarios.session_count() == 0);
}

TEST_CASE("all-zero irradiance is accepted") {
    json j = tiny_json();
    j["scenarios"][0]["irradiance"] = 0.0;
    const auto in = load("dark", j);
    CHECK(in.scenarios.scenarios[0].irradiance_kw_m2 == std::vector<double>(6, 0.0));
}

TEST_CASE("sell price equal to buy price is rejected with its slot") {
    json j = tiny_json();
    j["scenarios"][0]["sell_price"][2] = j["scenarios"][0]["buy_price"][2];
    try {
        load("prices", j);
        FAIL("expected InvariantViolation");
    } catch (const InvariantViolation& e) {
        CHECK(std::string(e.what()).find("slot 3") != std::string::npos);
    }
}

TEST_CASE("session windows") {
    json j = tiny_json();
    j["scenarios"][0]["sessions"][1]["departure_slot"] = 3;
    try {
        load("window", j);
        FAIL("expected SessionWindowError");
    } catch (const SessionWindowError& e) {
        CHECK(std::string(e.what()).find("truck-b") != std::string::npos);
    }
    j["scenarios"][0]["sessions"][1]["departure_slot"] = 7;
    CHECK_THROWS_AS(load("window", j), SessionWindowError);
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(ingest::load_inputs(cehtest::scratch_dir("missing") / "config.json"), MissingFile);

    json j = tiny_json();
    j["technologies"]["pv"][0]["colour"] = "blue";
    CHECK_THROWS_AS(load("unknown", j), SchemaViolation);

    j = tiny_json();
    j["scenarios"][0].erase("buy_price");
    CHECK_THROWS_AS(load("nofield", j), SchemaViolation);

    j = tiny_json();
    j["scenarios"][0]["irradiance"] = json::array({0.1, 0.2});
    CHECK_THROWS(load("short", j));

    j = tiny_json();
    j["scenarios"][0]["sessions"][1]["vehicle_id"] = "truck-a";
    CHECK_THROWS_AS(load("dupe", j), SchemaViolation);

    j = tiny_json();
    j["scenarios"][0]["sessions"] = "sessions/none.csv";
    CHECK_THROWS_AS(load("nofile", j), MissingFile);

    const auto dir = cehtest::scratch_dir("badjson");
    std::ofstream(dir / "config.json") << "{ not json";
    CHECK_THROWS_AS(ingest::load_inputs(dir / "config.json"), SchemaViolation);
}

TEST_CASE("invariant errors") {
    json j = tiny_json();
    j["scenarios"][1]["occurrence_days"] = 100;
    CHECK_THROWS_AS(load("days", j), InvariantViolation);

    j = tiny_json();
    j["delta_t_hours"] = 5.0;
    CHECK_THROWS_AS(load("dt", j), InvariantViolation);

    j = tiny_json();
    j["technologies"]["bess"][0]["soc_init_frac"] = 0.99;
    CHECK_THROWS_AS(load("soc", j), InvariantViolation);

    j = tiny_json();
    j["economics"]["discount_rate"] = 0.0;
    CHECK_THROWS_AS(load("rate", j), InvariantViolation);
}

TEST_CASE("weekday and weekend counts match an independent calendar") {
    CHECK(ingest::count_days(2024, 1, ingest::DayKind::Weekday) == 23);
    CHECK(cehtest::weekday_count(2024, 1) == 23);
    for (int year = 2019; year <= 2031; ++year) {
        int total = 0;
        for (int month = 1; month <= 12; ++month) {
            CHECK(ingest::count_days(year, month, ingest::DayKind::Weekday) == cehtest::weekday_count(year, month));
            CHECK(ingest::count_days(year, month, ingest::DayKind::Weekend) == cehtest::weekend_count(year, month));
            total += ingest::count_days(year, month, ingest::DayKind::Weekday) + ingest::count_days(year, month, ingest::DayKind::Weekend);
        }
        CHECK(total == ((year % 4 == 0) ? 366 : 365));
    }
}

TEST_CASE("calendar configs pair weather with demand") {
    const auto in = load("calendar", calendar_json(2023, 24));
    REQUIRE(in.scenarios.scenarios.size() == 24);
    CHECK(in.scenarios.scenarios[0].id == "2023-01-weekday");
    CHECK(in.scenarios.scenarios[0].occurrence_days == cehtest::weekday_count(2023, 1));
    CHECK(in.scenarios.scenarios[1].occurrence_days == cehtest::weekend_count(2023, 1));
    CHECK(in.scenarios.scenarios[0].sessions.size() == 1);
    CHECK(in.scenarios.scenarios[1].sessions.empty());
    CHECK(in.scenarios.total_days() == 365);

    CHECK_THROWS_AS(load("calendar23", calendar_json(2023, 23)), CalendarMismatch);
}

TEST_CASE("series and session files") {
    const auto dir = cehtest::scratch_dir("files");
    ingest::write_series(dir / "a.csv", {0.1, 1e-17, 3.0});
    CHECK(ingest::read_series(dir / "a.csv") == std::vector<double>{0.1, 1e-17, 3.0});
    const std::vector<ChargingSession> sessions{cehtest::session("x", 1, 3, 12.5, 150.0), cehtest::session("y", 2, 6, 0.1, 1.0 / 3.0)};
    ingest::write_sessions(dir / "s.csv", sessions);
    CHECK(ingest::read_sessions(dir / "s.csv") == sessions);

    std::ofstream(dir / "bad.csv") << "slot,val\n1,2\n";
    CHECK_THROWS_AS(ingest::read_series(dir / "bad.csv"), SchemaViolation);
    std::ofstream(dir / "gap.csv") << "slot,value\n1,2\n3,4\n";
    CHECK_THROWS_AS(ingest::read_series(dir / "gap.csv"), SchemaViolation);
    std::ofstream(dir / "text.csv") << "slot,value\n1,abc\n";
    CHECK_THROWS_AS(ingest::read_series(dir / "text.csv"), SchemaViolation);
}

}  // TEST_SUITE
