#pragma once

// Second-order moment equations for atoms spread over the cavity mode
// function. Atoms sit in M bins at phases theta_m with N_m atoms each; the
// collective coupling between bins n and m is gamma_c cos(theta_n) cos(theta_m).

#include <Eigen/Dense>
#include <vector>

#include "bcl/params.hpp"
#include "bcl/relaxation.hpp"

namespace bcl {

struct InhomConfig {
    std::vector<double> positions; // theta_m
    std::vector<int> counts;       // N_m

    int bins() const { return static_cast<int>(positions.size()); }
    int total_atoms() const;

    /// theta_m = 2 pi (m - 1/2) / M with the atoms shared as evenly as
    /// possible (the first N mod M bins get one extra).
    static InhomConfig uniform(int n_atoms, int bins);
    /// Every atom at one phase.
    static InhomConfig single(int n_atoms, double theta);

    /// gamma_c cos(theta_n) cos(theta_m).
    double coupling(int n, int m, double gamma_c) const;
    Eigen::MatrixXd coupling_matrix(double gamma_c) const;

    /// Throws DomainError unless the lists agree in length, counts are
    /// non-negative and they sum to n_atoms.
    void validate(int n_atoms) const;
};

/// sz[k] = <s_{1,k}^z>, spm(k, q) = symmetrised <s_{1,k}^+ s_{2,q}^->,
/// szz(k, q) = <s_{1,k}^z s_{2,q}^z>. Both matrices are symmetric.
struct InhomState {
    Eigen::VectorXd sz;
    Eigen::MatrixXd spm;
    Eigen::MatrixXd szz;

    static InhomState all_down(int bins);
};

/// Time derivative of every moment. Dephasing, when present, damps spm at
/// 4/T2 as in the homogeneous model.
InhomState inhom_rhs(const InhomState &s, const InhomConfig &cfg, const ModelParams &p);

/// Looser integration settings suited to the O(M^2)-dimensional system; the
/// Newton polish still fixes the final accuracy.
RelaxationOptions inhom_relaxation_options();

/// Integrate-then-Newton steady state from all-down; p.n_atoms must equal
/// the configured total.
InhomState inhom_steady(const InhomConfig &cfg, const ModelParams &p,
                        const RelaxationOptions &opts = inhom_relaxation_options(),
                        RelaxationResult *diagnostics = nullptr);

struct InhomObservables {
    int n_atoms = 0;
    double jz_mean = 0.0;   // <J^z> = (1/2) sum_m N_m sz_m
    double power = 0.0;     // gamma_c P, cavity output in units of the photon energy
    double sf = 0.0;
    double sigz_mean = 0.0; // <J^z> / (N/2)
};

InhomObservables inhom_observables(const InhomState &s, const InhomConfig &cfg,
                                   const ModelParams &p);

/// X_k = (1/N) sum_m N_m cos(theta_m) spm(k, m).
Eigen::VectorXd inhom_x(const InhomState &s, const InhomConfig &cfg);

} // namespace bcl
