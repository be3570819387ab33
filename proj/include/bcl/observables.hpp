#pragma once

#include <optional>

#include "bcl/steady_solver.hpp"

namespace bcl {

struct ObservablesRecord {
    int n_atoms = 0;
    double jz_mean = 0.0; // <J^z>
    double jz_var = 0.0;  // (Delta J^z)^2
    double jpjm = 0.0;    // <J^+ J^->
    std::optional<double> jp2jm2; // <J^+ J^+ J^- J^->
    double j2_mean = 0.0; // <J^2>
    double sf = 0.0;      // subradiance factor
    double xi2 = 0.0;     // (sum of the three collective variances) / (N/2)
    /// g2 = g2_numerator / g2_denominator; absent when <J^+J^-> == 0 or
    /// when the fourth moment is unavailable.
    std::optional<double> g2;
    double g2_numerator = 0.0;
    double g2_denominator = 0.0;
    double sigz_mean = 0.0; // <sigma_1^z>
    double spm_corr = 0.0;  // <sigma_1^+ sigma_2^->
};

/// Assembles the derived fields from raw collective moments. The transverse
/// means are taken to vanish (U(1) symmetry), so the squeezing parameter is
/// (<J^2> - <J^z>^2) / (N/2).
ObservablesRecord assemble_observables(int n_atoms, double jz_mean, double jz2_mean, double jpjm,
                                       std::optional<double> jp2jm2, double j2_mean);

/// Diagonal (J, M) expectation values of a population vector.
ObservablesRecord compute_observables(const PopulationVector &pv);

} // namespace bcl
