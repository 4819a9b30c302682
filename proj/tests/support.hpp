#pragma once

#include <cmath>
#include <vector>

#include "qhe/config.hpp"

namespace qhe::test {

/// Reference dynamics parameters on a short horizon.
inline SimulationConfig short_reference(std::size_t n_steps = 4001)
{
    SimulationConfig c = hle_reference_config();
    c.grid.n_steps = n_steps;
    return c;
}

inline bool close_rel(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline double max_abs_diff(std::vector<double> const& a, std::vector<double> const& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace qhe::test
