#include "ceh/inputs.hpp"

#include <algorithm>

namespace ceh {

std::string_view to_string(AssetClass asset) {
    switch (asset) {
        case AssetClass::Pv: return "pv";
        case AssetClass::Wt: return "wt";
        case AssetClass::Bess: return "bess";
        case AssetClass::Charger: return "charger";
    }
    return "?";
}

int ScenarioSet::total_days() const {
    int days = 0;
    for (const auto& s : scenarios) days += s.occurrence_days;
    return days;
}

int ScenarioSet::slot_count() const { return scenarios.empty() ? 0 : scenarios.front().slot_count(); }

double ScenarioSet::delta_t_hours() const {
    return scenarios.empty() ? 1.0 : scenarios.front().delta_t_hours;
}

int ScenarioSet::max_parked_slots() const {
    int best = 0;
    for (const auto& s : scenarios)
        for (const auto& v : s.sessions) best = std::max(best, v.departure_slot - v.arrival_slot);
    return best;
}

std::size_t ScenarioSet::session_count() const {
    std::size_t n = 0;
    for (const auto& s : scenarios) n += s.sessions.size();
    return n;
}

}  // namespace ceh
