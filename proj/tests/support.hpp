#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "bcl/dicke_space.hpp"
#include "bcl/steady_solver.hpp"

namespace testing {

inline bool close(double a, double b, double abs_tol, double rel_tol = 0.0) {
    return std::abs(a - b) <= abs_tol + rel_tol * std::max(std::abs(a), std::abs(b));
}

/// Unit population on one (J, M) state of the untruncated space.
inline bcl::PopulationVector delta_state(int n_atoms, int two_j, int two_m) {
    bcl::PopulationVector pv;
    pv.space = std::make_shared<const bcl::StateSpace>(bcl::build_space(n_atoms));
    pv.p.assign(pv.space->size(), 0.0);
    pv.p[pv.space->index({two_j, two_m})] = 1.0;
    return pv;
}

} // namespace testing
