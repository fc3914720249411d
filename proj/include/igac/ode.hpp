/**
 * @file ode.hpp
 * @brief Adaptive Dormand-Prince 5(4) integrator with dense output.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace igac::ode {

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Returns false when an accepted state leaves the admissible region.
using StateCheck = std::function<bool(std::span<const double> y)>;

struct Options {
    double rtol = 1e-9;
    double atol = 1e-19;
    std::size_t max_steps = 5'000'000;
};

struct Solution {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
};

/// Integrates y' = f(t, y) from grid.front() to grid.back(), reporting the
/// state at every grid time (strictly increasing). Interior grid times use the
/// 4th-order continuous extension; the final time is stepped to exactly.
/// Throws DomainExitError when `check` rejects an accepted state and
/// StiffnessError when the step underflows.
[[nodiscard]] Solution integrate(const Rhs& f, std::span<const double> y0, std::span<const double> grid,
                                 const Options& options, const StateCheck& check = {});

}  // namespace igac::ode
