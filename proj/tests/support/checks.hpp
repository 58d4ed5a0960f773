#pragma once

// Test-side checks on decoded solutions. They recompute generator output,
// durations and loads from the raw inputs instead of trusting the library.

#include <functional>
#include <string>
#include <vector>

#include "ceh/report.hpp"

namespace cehtest {

/// Hub-height power law plus the piecewise turbine curve written out with
/// the cubic ratio (v / v_rated)^3.
double turbine_power(const ceh::WtTechnology& tech, double measured_m_s);

/// Grid within limits, SOC within its band, every session once inside its
/// window, no charger double-booked, power balance residual within 1e-6 of
/// the largest slot load. Returns one message per failure.
std::vector<std::string> feasibility_failures(const ceh::HubSolution& solution, const ceh::ModelInputs& inputs);

/// Largest |C^el - max(dt buy P^g, dt sell P^g)| over every slot.
double relaxation_gap(const ceh::HubSolution& solution, const ceh::ModelInputs& inputs);

/// A perturbation that breaks one constraint family of a feasible solution.
struct Mutation {
    ceh::ConstraintFamily family;
    std::string description;
    /// Returns false when the solution offers nothing to perturb.
    std::function<bool(ceh::HubSolution&, const ceh::ModelInputs&)> apply;
};

/// One mutation per constraint family, all families covered.
std::vector<Mutation> family_mutations();

}  // namespace cehtest
