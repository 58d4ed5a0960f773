#include <sys/wait.h>

#include <fstream>
#include <functional>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "ceh/errors.hpp"
#include "ceh/run.hpp"
#include "instances.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Runs the tool with output captured into `log`; returns its exit status.
int cehsize(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("'") + CEHSIZE_EXE + "' " + args + " > '" + log.string() + "' 2>&1";
    const int raw = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(raw));
    return WEXITSTATUS(raw);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& path) { return json::parse(slurp(path)); }

fs::path tiny_variant(const std::string& name, const std::function<void(json&)>& edit) {
    json j = read_json(cehtest::tiny_config());
    edit(j);
    const auto dir = cehtest::scratch_dir(name);
    std::ofstream(dir / "config.json") << j.dump(2);
    return dir / "config.json";
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate") {
    const auto dir = cehtest::scratch_dir("cli-validate");
    CHECK(cehsize("validate --config " + quoted(cehtest::tiny_config()), dir / "ok.log") == 0);

    const auto window = tiny_variant("cli-window", [](json& j) { j["scenarios"][0]["sessions"][0]["departure_slot"] = 9; });
    CHECK(cehsize("validate --config " + quoted(window), dir / "window.log") == 2);
    CHECK(slurp(dir / "window.log").find("truck-a") != std::string::npos);

    // 1300 kWh at 150 kW needs three 4 h slots; truck-b is parked for two
    const auto tight = tiny_variant("cli-tight", [](json& j) {
        j["scenarios"][0]["sessions"][1]["arrival_slot"] = 5;
        j["scenarios"][0]["sessions"][1]["energy_kwh"] = 1300.0;
    });
    CHECK(cehsize("validate --config " + quoted(tight), dir / "tight.log") == 3);

    CHECK(cehsize("validate --config " + quoted(cehtest::case_study_config()), dir / "leap.log") == 0);
    CHECK(slurp(dir / "leap.log").find("warning") != std::string::npos);
}

TEST_CASE("size writes reports that match the frozen optimum") {
    const auto out = cehtest::scratch_dir("cli-size");
    REQUIRE(cehsize("size --config " + quoted(cehtest::tiny_config()) + " --out " + quoted(out / "r") + " --export-model", out / "log") == 0);
    const auto summary = read_json(out / "r" / "summary.json");
    CHECK(summary["status"] == "Optimal");
    CHECK(summary["objective"].get<double>() == doctest::Approx(cehtest::kTinyOracleObjective).epsilon(1e-6));
    for (const char* f : {"grid_power.csv", "charging_power.csv", "soc.csv", "schedule.csv", "model.mps", "constraints.txt", "run_manifest.json"}) {
        CHECK_MESSAGE(fs::exists(out / "r" / f), f);
    }
    const auto manifest = read_json(out / "r" / "run_manifest.json");
    CHECK(manifest["command"] == "size");
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["options"]["backend"] == "highs");

    // a second run reproduces every report byte for byte
    REQUIRE(cehsize("size --config " + quoted(cehtest::tiny_config()) + " --out " + quoted(out / "again"), out / "log2") == 0);
    for (const char* f : {"grid_power.csv", "charging_power.csv", "soc.csv", "schedule.csv", "summary.json"}) {
        CHECK_MESSAGE(slurp(out / "r" / f) == slurp(out / "again" / f), f);
    }

    REQUIRE(cehsize("size --backend enumeration --config " + quoted(cehtest::tiny_config()) + " --out " + quoted(out / "oracle"), out / "log3") == 0);
    CHECK(read_json(out / "oracle" / "summary.json")["objective"].get<double>() ==
          doctest::Approx(cehtest::kTinyOracleObjective).epsilon(1e-9));
}

TEST_CASE("time limit") {
    const auto out = cehtest::scratch_dir("cli-limit");
    const int code = cehsize("size --config " + quoted(cehtest::case_study_config()) + " --time-limit 0.001 --out " + quoted(out / "r"), out / "log");
    CHECK((code == 30 || code == 10));
    CHECK(read_json(out / "r" / "run_manifest.json")["exit_code"] == code);
}

TEST_CASE("crosscheck") {
    const auto out = cehtest::scratch_dir("cli-cross");
    CHECK(cehsize("crosscheck --config " + quoted(cehtest::tiny_config()), out / "ok.log") == 0);
    CHECK(cehsize("crosscheck --config " + quoted(cehtest::tiny_config()) + " --oracle-caps 4,10", out / "caps.log") == 41);
    const auto idle = tiny_variant("cli-idle", [](json& j) {
        for (auto& s : j["scenarios"]) s["sessions"] = json::array();
    });
    CHECK(cehsize("crosscheck --config " + quoted(idle), out / "idle.log") == 0);
}

TEST_CASE("export") {
    const auto out = cehtest::scratch_dir("cli-export");
    REQUIRE(cehsize("export --config " + quoted(cehtest::tiny_config()) + " --out " + quoted(out), out / "log") == 0);
    CHECK(slurp(out / "model.mps").find("ROWS") != std::string::npos);
    CHECK(slurp(out / "constraints.txt").find("occupancy") != std::string::npos);
}

TEST_CASE("failures still leave a manifest") {
    const auto out = cehtest::scratch_dir("cli-fail");
    const auto bad = tiny_variant("cli-bad", [](json& j) { j["delta_t_hours"] = 5.0; });
    CHECK(cehsize("size --config " + quoted(bad) + " --out " + quoted(out / "r"), out / "log") == 2);
    const auto manifest = read_json(out / "r" / "run_manifest.json");
    CHECK(manifest["exit_code"] == 2);
    CHECK(manifest["error"].get<std::string>().find("InvariantViolation") != std::string::npos);
    CHECK(manifest["objective"].is_null());
}

TEST_CASE("usage errors") {
    const auto out = cehtest::scratch_dir("cli-usage");
    CHECK(cehsize("size --config " + quoted(cehtest::tiny_config()) + " --bogus", out / "flag.log") == 2);
    CHECK(cehsize("size", out / "nocfg.log") == 2);
    CHECK(cehsize("size --config " + quoted(out / "missing.json"), out / "missing.log") == 2);
    CHECK(cehsize("size --backend cplex --config " + quoted(cehtest::tiny_config()), out / "backend.log") == 60);
    CHECK(cehsize("--version", out / "version.log") == 0);
    CHECK(slurp(out / "version.log").find(ceh::run::kToolVersion) != std::string::npos);
}

TEST_CASE("generator output loads") {
    const auto out = cehtest::scratch_dir("cli-gen");
    const std::string cmd = std::string("'") + CEHGEN_EXE + "' --out " + quoted(out / "cs") + " --year 2023 --seed 5 > /dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(cehsize("validate --config " + quoted(out / "cs" / "config.json"), out / "log") == 0);
}

TEST_CASE("error classes map to exit codes") {
    using namespace ceh;
    CHECK(run::exit_code_for(SchemaViolation("x")) == 2);
    CHECK(run::exit_code_for(InfeasibleSession("x")) == 3);
    CHECK(run::exit_code_for(InfeasibleInstance("x")) == 20);
    CHECK(run::exit_code_for(EnumerationTooLarge("x", 1.0)) == 41);
    CHECK(run::exit_code_for(ValidationFailure("x")) == 50);
    CHECK(run::exit_code_for(BackendUnavailable("x")) == 60);
    CHECK(run::exit_code_for(std::runtime_error("x")) == 1);
}

}  // TEST_SUITE
