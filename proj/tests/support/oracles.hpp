#pragma once

// Test-side reference computations. Nothing here calls into the library's
// formula code; each value is derived along a different route.

#include <map>
#include <vector>

#include "ceh/ingest.hpp"
#include "ceh/milp.hpp"

namespace cehtest {

/// Capital recovery factor as the reciprocal of the annuity present-value
/// sum 1 / sum_{k=1..L} (1+r)^-k.
double kappa_annuity(double rate, int lifetime_years);

/// Day of week by Sakamoto's method, 0 = Sunday.
int day_of_week(int year, int month, int day);
int days_in_month(int year, int month);
int weekday_count(int year, int month);
int weekend_count(int year, int month);

/// Smallest number of slots whose charging at `rate_kw` delivers `energy_kwh`,
/// counted in whole hours first and then in slots, by linear search.
int tau_by_search(double energy_kwh, double rate_kw, double delta_t_hours);

/// 1-based start offsets t_r whose charging interval of `tau` slots stays
/// inside [arrival, departure], found by trying every slot.
std::vector<int> feasible_starts(int arrival_slot, int departure_slot, int tau);

/// Row and column counts the hub model should have, by family, derived from
/// the inputs with the search oracles above.
struct ExpectedSize {
    std::map<ceh::ConstraintFamily, int> rows;
    int columns = 0;
    int integer_columns = 0;
};
ExpectedSize expected_size(const ceh::ModelInputs& inputs);

std::map<ceh::ConstraintFamily, int> count_rows(const ceh::MilpProblem& problem);

}  // namespace cehtest
