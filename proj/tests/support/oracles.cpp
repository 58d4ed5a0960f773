#include "oracles.hpp"

#include <algorithm>

namespace cehtest {

using ceh::ConstraintFamily;

double kappa_annuity(double rate, int lifetime_years) {
    long double present_value = 0.0L;
    long double discount = 1.0L;
    for (int k = 1; k <= lifetime_years; ++k) {
        discount /= 1.0L + rate;
        present_value += discount;
    }
    return static_cast<double>(1.0L / present_value);
}

int day_of_week(int year, int month, int day) {
    static const int offsets[] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
    if (month < 3) year -= 1;
    return (year + year / 4 - year / 100 + year / 400 + offsets[month - 1] + day) % 7;
}

int days_in_month(int year, int month) {
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29 : lengths[month - 1];
}

int weekend_count(int year, int month) {
    int n = 0;
    for (int d = 1; d <= days_in_month(year, month); ++d) {
        const int w = day_of_week(year, month, d);
        if (w == 0 || w == 6) ++n;
    }
    return n;
}

int weekday_count(int year, int month) { return days_in_month(year, month) - weekend_count(year, month); }

int tau_by_search(double energy_kwh, double rate_kw, double delta_t_hours) {
    int hours = 0;
    while (hours * rate_kw < energy_kwh - 1e-9 * rate_kw) ++hours;
    int slots = 0;
    while (slots * delta_t_hours < hours - 1e-9 * std::max(delta_t_hours, static_cast<double>(hours))) ++slots;
    return slots;
}

std::vector<int> feasible_starts(int arrival_slot, int departure_slot, int tau) {
    std::vector<int> out;
    for (int start = arrival_slot; start <= departure_slot; ++start) {
        const int last = start + tau - 1;
        if (tau >= 1 && last <= departure_slot) out.push_back(start - arrival_slot + 1);
    }
    return out;
}

ExpectedSize expected_size(const ceh::ModelInputs& inputs) {
    const auto& cat = inputs.catalog;
    const bool symmetry = inputs.options.symmetry_breaking;
    const bool per_tech = inputs.options.per_technology_bess_mode;
    ExpectedSize e;
    for (auto f : ceh::all_families()) e.rows[f] = 0;

    // candidates in catalog order: (type, ordinal)
    std::vector<int> type_of;
    for (std::size_t l = 0; l < cat.chargers.size(); ++l)
        for (int j = 0; j < cat.chargers[l].candidate_count; ++j) type_of.push_back(static_cast<int>(l));
    const int C = static_cast<int>(type_of.size());
    const int B = static_cast<int>(cat.bess.size());

    e.columns = static_cast<int>(cat.pv.size() + cat.wt.size()) + B + C;
    e.integer_columns = e.columns;
    if (symmetry)
        for (const auto& type : cat.chargers) e.rows[ConstraintFamily::SymmetryInstall] += type.candidate_count - 1;

    for (const auto& s : inputs.scenarios.scenarios) {
        const int T = s.slot_count();
        e.rows[ConstraintFamily::PriceRelaxation] += 2 * T;
        e.rows[ConstraintFamily::PowerBalance] += T;
        e.columns += 2 * T;
        if (B > 0) {
            const int modes = per_tech ? B * T : T;
            e.columns += modes + B * (2 * T + T + 1);
            e.integer_columns += modes;
            e.rows[ConstraintFamily::InitialSoc] += B;
            e.rows[ConstraintFamily::SocRecursion] += B * T;
            e.rows[ConstraintFamily::SocBounds] += B * 2 * (T + 1);
            e.rows[ConstraintFamily::BessPowerCaps] += B * 2 * T;
            e.rows[ConstraintFamily::BessExclusivity] += B * 2 * T;
        }
        e.rows[ConstraintFamily::ExactlyOneStart] += static_cast<int>(s.sessions.size());
        e.rows[ConstraintFamily::Occupancy] += C * T;
        e.rows[ConstraintFamily::ChargerPower] += C * T;
        e.columns += C * T;
        for (const auto& v : s.sessions) {
            for (int c = 0; c < C; ++c) {
                const auto& type = cat.chargers[static_cast<std::size_t>(type_of[static_cast<std::size_t>(c)])];
                const double rate = std::min(v.max_vehicle_rate_kw, type.max_power_kw);
                const int tau = tau_by_search(v.energy_kwh, rate, s.delta_t_hours);
                const int window = static_cast<int>(feasible_starts(v.arrival_slot, v.departure_slot, tau).size());
                e.rows[ConstraintFamily::ChargerLinking] += window;
                e.columns += window;
                e.integer_columns += window;
                if (symmetry && c > 0 && type_of[static_cast<std::size_t>(c)] == type_of[static_cast<std::size_t>(c - 1)]) {
                    e.rows[ConstraintFamily::SymmetryUsage] += window;
                }
            }
        }
    }
    return e;
}

std::map<ConstraintFamily, int> count_rows(const ceh::MilpProblem& problem) {
    std::map<ConstraintFamily, int> out;
    for (auto f : ceh::all_families()) out[f] = 0;
    for (const auto& row : problem.rows()) ++out[row.family];
    return out;
}

}  // namespace cehtest
