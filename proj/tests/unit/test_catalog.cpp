#include <cmath>

#include <doctest.h>

#include "ceh/catalog.hpp"
#include "ceh/errors.hpp"
#include "ceh/synthetic.hpp"
#include "checks.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace ceh;
using doctest::Approx;

TEST_SUITE("catalog") {

TEST_CASE("pv unit output is linear in irradiance") {
    PvTechnology pv;
    pv.efficiency = 0.20;
    pv.area_m2 = 2.58;
    CHECK(catalog::pv_unit_power(pv, 1.0) == Approx(0.516).epsilon(1e-12));
    CHECK(catalog::pv_unit_power(pv, 0.5) == Approx(0.258).epsilon(1e-12));
    CHECK(catalog::pv_unit_power(pv, 0.0) == 0.0);
}

TEST_CASE("wind speed power law") {
    WtTechnology wt;
    // 5 * exp(0.143 ln 6), evaluated offline
    CHECK(catalog::scale_wind_speed(wt, 5.0) == Approx(6.460195086800916).epsilon(1e-12));
    CHECK(catalog::scale_wind_speed(wt, 5.0) == Approx(5.0 * std::exp(0.143 * std::log(6.0))).epsilon(1e-14));
    CHECK(catalog::scale_wind_speed(wt, 0.0) == 0.0);
    wt.hub_height_m = wt.measurement_height_m;
    CHECK(catalog::scale_wind_speed(wt, 7.3) == 7.3);
    wt.measurement_height_m = 0.0;
    CHECK_THROWS_AS(catalog::scale_wind_speed(wt, 5.0), ConfigError);
}

TEST_CASE("turbine curve of the case-study turbine") {
    const WtTechnology wt = synthetic::case_study_catalog().wt.front();
    CHECK(catalog::wt_unit_power(wt, 13.0) == Approx(500.0).epsilon(1e-12));
    CHECK(catalog::wt_unit_power(wt, 15.0) == Approx(500.0).epsilon(1e-12));
    CHECK(catalog::wt_unit_power(wt, 2.9) == 0.0);
    CHECK(catalog::wt_unit_power(wt, 20.5) == 0.0);
    CHECK(catalog::wt_unit_power(wt, 6.5) == Approx(62.5).epsilon(1e-12));
    // both routes agree across the whole curve
    for (double v = 0.0; v <= 25.0; v += 0.37) {
        const double measured = v / std::pow(wt.hub_height_m / wt.measurement_height_m, wt.shear_exponent);
        CHECK(catalog::wt_unit_power_from_measured(wt, measured) == Approx(cehtest::turbine_power(wt, measured)).epsilon(1e-9));
    }
}

TEST_CASE("efficiency coefficient of the case-study turbine is below the Betz limit") {
    const WtTechnology wt = synthetic::case_study_catalog().wt.front();
    CHECK(wt.efficiency_coefficient() > 0.0);
    CHECK(wt.efficiency_coefficient() < kBetzLimit);
}

TEST_CASE("capital recovery factor against the annuity sum") {
    CHECK(catalog::capital_recovery_factor(0.0275, 10) == Approx(cehtest::kappa_annuity(0.0275, 10)).epsilon(1e-12));
    CHECK(catalog::capital_recovery_factor(0.0275, 20) == Approx(cehtest::kappa_annuity(0.0275, 20)).epsilon(1e-12));
    CHECK(catalog::capital_recovery_factor(0.0275, 10) == Approx(0.11573972047114).epsilon(1e-10));
    CHECK(catalog::capital_recovery_factor(0.0275, 20) == Approx(0.06567173060607).epsilon(1e-10));
    for (int lifetime = 1; lifetime <= 40; ++lifetime) {
        for (double r : {0.005, 0.0275, 0.08}) {
            CHECK(catalog::capital_recovery_factor(r, lifetime) == Approx(cehtest::kappa_annuity(r, lifetime)).epsilon(1e-11));
        }
    }
    const double long_lived = catalog::capital_recovery_factor(0.0275, 500);
    CHECK(long_lived > 0.0275);
    CHECK(long_lived - 0.0275 < 1e-6);
    CHECK_THROWS_AS(catalog::capital_recovery_factor(0.0, 10), ConfigError);
    CHECK_THROWS_AS(catalog::capital_recovery_factor(0.03, 0.5), ConfigError);
}

TEST_CASE("effective rate is the smaller of vehicle and charger") {
    const auto ev = cehtest::session("t", 1, 4, 300.0, 400.0);
    CHECK(catalog::effective_rate(ev, cehtest::charger_type("a", 180.0, 0.0, 1)) == 180.0);
    CHECK(catalog::effective_rate(ev, cehtest::charger_type("b", 360.0, 0.0, 1)) == 360.0);
    CHECK(catalog::effective_rate(ev, cehtest::charger_type("c", 400.0, 0.0, 1)) == 400.0);
}

TEST_CASE("charging duration in slots") {
    const auto slow = cehtest::charger_type("slow", 180.0, 0.0, 1);
    const auto fast = cehtest::charger_type("fast", 360.0, 0.0, 1);
    CHECK(catalog::charging_duration_slots(cehtest::session("a", 1, 5, 300.0), slow, 1.0) == 2);
    CHECK(catalog::charging_duration_slots(cehtest::session("a", 1, 5, 360.0), fast, 1.0) == 1);
    CHECK(catalog::charging_duration_slots(cehtest::session("a", 1, 5, 300.0), fast, 1.0) == 1);
    // 3 h at 0.5 h slots, and 3 h at 2 h slots (rounded up)
    CHECK(catalog::charging_duration_slots(cehtest::session("a", 1, 5, 500.0), slow, 0.5) == 6);
    CHECK(catalog::charging_duration_slots(cehtest::session("a", 1, 5, 500.0), slow, 2.0) == 2);
    CHECK(catalog::duration_needs_extra_rounding(cehtest::session("a", 1, 5, 500.0), slow, 2.0));
    CHECK_FALSE(catalog::duration_needs_extra_rounding(cehtest::session("a", 1, 5, 500.0), slow, 1.0));

    cehtest::Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const double energy = rng.rounded(1.0, 2000.0, 0.5);
        const double power = rng.rounded(20.0, 400.0, 10.0);
        const double dt = std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0}[static_cast<std::size_t>(rng.integer(0, 4))];
        const auto ev = cehtest::session("x", 1, 2, energy, 1000.0);
        CHECK(catalog::charging_duration_slots(ev, cehtest::charger_type("c", power, 0.0, 1), dt) ==
              cehtest::tau_by_search(energy, power, dt));
    }
}

TEST_CASE("start windows") {
    // parked in slots 4..6, two slots of charging: starts at offsets 1 and 2
    const auto ev = cehtest::session("a", 4, 6, 1.0);
    CHECK(catalog::start_window_length(ev, 2) == 2);
    CHECK(cehtest::feasible_starts(4, 6, 2) == std::vector<int>{1, 2});
    CHECK(catalog::start_window_length(ev, 3) == 1);
    CHECK(catalog::start_window_length(ev, 4) == 0);

    for (int arrival = 1; arrival <= 10; ++arrival)
        for (int departure = arrival + 1; departure <= 12; ++departure)
            for (int tau = 1; tau <= 12; ++tau) {
                const auto s = cehtest::session("v", arrival, departure, 1.0);
                CHECK(catalog::start_window_length(s, tau) == static_cast<int>(cehtest::feasible_starts(arrival, departure, tau).size()));
            }
}

TEST_CASE("session feasibility against the fastest charger") {
    const std::vector<ChargerType> types{cehtest::charger_type("slow", 180.0, 0.0, 1), cehtest::charger_type("fast", 360.0, 0.0, 1)};
    // 700 kWh needs 2 h at 360 kW, 4 h at 180 kW
    CHECK_NOTHROW(catalog::check_session_feasibility(cehtest::session("a", 3, 4, 700.0), types, 1.0));
    CHECK_THROWS_AS(catalog::check_session_feasibility(cehtest::session("a", 3, 4, 800.0), types, 1.0), InfeasibleSession);
    CHECK_THROWS_AS(catalog::check_session_feasibility(cehtest::session("a", 3, 4, 1100.0), types, 1.0), InfeasibleSession);
    CHECK_THROWS_AS(catalog::check_session_feasibility(cehtest::session("a", 3, 4, 10.0), {}, 1.0), InfeasibleSession);
}

TEST_CASE("candidate chargers follow catalog order") {
    const auto cat = synthetic::case_study_catalog();
    const auto candidates = cat.candidate_chargers();
    REQUIRE(candidates.size() == 12);
    CHECK(cat.candidate_count() == 12);
    CHECK(candidates[0] == CandidateCharger{0, 0});
    CHECK(candidates[5] == CandidateCharger{0, 5});
    CHECK(candidates[6] == CandidateCharger{1, 0});
    CHECK(candidates[11] == CandidateCharger{1, 5});
}

}  // TEST_SUITE
