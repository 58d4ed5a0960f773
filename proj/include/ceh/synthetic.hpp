#pragma once

#include <cstdint>

#include "ceh/ingest.hpp"

namespace ceh::synthetic {

/// Technology data of the heavy-duty fleet hub: one PV, WT and BESS
/// technology and two charger types with six candidates each.
TechnologyCatalog case_study_catalog();
EconomicParams case_study_economics();

struct CaseStudyOptions {
    int year = 2024;
    int weekday_sessions = 14;
    int weekend_sessions = 6;
    std::uint64_t seed = 1;
};

/// Stand-in for the proprietary case-study data: 12 monthly weather and
/// price profiles and 24 weekday/weekend demand profiles at hourly
/// resolution, drawn from seeded seasonal models. Deterministic for a given
/// seed on every platform.
ModelInputs case_study(const CaseStudyOptions& options = {});

}  // namespace ceh::synthetic
