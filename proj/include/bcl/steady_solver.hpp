#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bcl/rates.hpp"

namespace bcl {

enum class SteadyMethod {
    /// LU factorisation with one balance equation replaced by a pin on the
    /// most populated state, then normalised.
    DirectPinned,
    /// Inverse iteration on R - shift * I.
    InversePower,
};

struct SteadyOptions {
    SteadyMethod method = SteadyMethod::DirectPinned;
    /// Bound on ||R p||_inf. Non-positive means 1e-12 * max_k |R(k, k)|.
    double tol = 0.0;
    /// leaked_flux above this attaches a warning to the result.
    double leak_warning = 1e-8;
    int max_iterations = 200;
};

struct PopulationVector {
    std::shared_ptr<const StateSpace> space;
    std::vector<double> p;
    double residual = 0.0;
    /// sum_k p_k * leakage_k: probability per unit time that would leave
    /// through the truncation rim.
    double leaked_flux = 0.0;
    double leaked_flux_ladder = 0.0;
    double leaked_flux_depth = 0.0;
    std::vector<std::string> warnings;
};

/// Stationary populations of R, normalised to unit sum. Tiny negative
/// entries (>= -1e-12) are clipped; anything more negative throws
/// SolverError, as does a residual above tolerance after the iteration cap.
PopulationVector steady_state(const RateMatrix &r, const SteadyOptions &opts = {});

} // namespace bcl
