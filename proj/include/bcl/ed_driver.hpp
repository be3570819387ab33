#pragma once

// Exact steady state in the (J, M) basis with automatic truncation.

#include <optional>

#include "bcl/observables.hpp"
#include "bcl/params.hpp"
#include "bcl/steady_solver.hpp"

namespace bcl {

struct TruncationPolicy {
    /// Grow the retained space until the leak and drift targets are met.
    /// When false, `two_j_max` / `depth_max` are used as given (unset means
    /// untruncated).
    bool automatic = true;
    std::optional<int> two_j_max;
    std::optional<int> depth_max;
    double leak_tol = 1e-10;
    /// Largest change of any per-atom observable between the last two
    /// truncations (relative for g2).
    double drift_tol = 1e-6;
    int max_rounds = 16;
};

struct EdResult {
    ObservablesRecord obs;
    PopulationVector populations;
    int two_j_max = 0;
    std::optional<int> depth_max;
    int rounds = 0;
    double drift = 0.0;
};

/// Largest per-atom difference between two records (see TruncationPolicy).
double observable_drift(const ObservablesRecord &a, const ObservablesRecord &b);

/// Steady state at one parameter point. Auto mode starts from
/// J_max = depth = max(64, 4 sqrt(N)) and doubles whichever rim leaks more
/// than leak_tol; once nothing leaks, the result is compared with the
/// previous (or a halved) truncation and both rims double until the drift
/// is below drift_tol. Throws SolverError if max_rounds is exhausted.
EdResult ed_steady(const ModelParams &p, const TruncationPolicy &policy = {},
                   const SteadyOptions &opts = {});

/// Fixed-space variant for sweeps that share one basis.
EdResult ed_steady(const ModelParams &p, const std::shared_ptr<const StateSpace> &space,
                   const SteadyOptions &opts = {});

} // namespace bcl
