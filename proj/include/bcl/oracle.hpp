#pragma once

// Brute-force reference: the full 4^N Liouvillian of the master equation,
// built from explicit Pauli operators. Only meant for N <= 4.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bcl/dicke_space.hpp"
#include "bcl/observables.hpp"
#include "bcl/params.hpp"

namespace bcl::oracle {

inline constexpr int kMaxAtoms = 4;

struct DensityMatrix {
    int n_atoms = 0;
    Eigen::MatrixXcd rho; // 2^N x 2^N, bit j set <=> atom j in |up>
};

/// Column-stacked superoperator, vec(rho) -> vec(L rho). `couplings` scales
/// each atom's share of the collective jump operator (all ones when empty),
/// so that the cavity term reads D[sqrt(gamma_c) sum_j c_j sigma_j^-].
Eigen::MatrixXcd build_liouvillian(const ModelParams &p, const std::vector<double> &couplings = {});

/// Normalised kernel of the Liouvillian. Throws SolverError when the kernel
/// is degenerate and CapabilityError above kMaxAtoms.
DensityMatrix oracle_steady(const ModelParams &p, const std::vector<double> &couplings = {});

/// Observables from operator expectations: the squeezing parameter uses all
/// three variances, spm_corr is <sigma_1^+ sigma_2^-> itself.
ObservablesRecord oracle_observables(const DensityMatrix &rho);

/// Single-atom and few-atom moments on atoms 1..4 (as far as N allows).
struct Moments {
    double sz = 0.0;
    std::complex<double> spm;    // <s1+ s2->
    double szz = 0.0;            // <s1z s2z>
    std::complex<double> spmz;   // <s1+ s2- s3z>
    double szzz = 0.0;           // <s1z s2z s3z>
    std::complex<double> spmzz;  // <s1+ s2- s3z s4z>
    std::complex<double> spmpm;  // <s1+ s2- s3+ s4->
    double jx_mean = 0.0;
    double jy_mean = 0.0;
};

Moments oracle_moments(const DensityMatrix &rho);

/// <sigma_a^+ sigma_b^-> for two distinct atoms.
std::complex<double> pair_coherence(const DensityMatrix &rho, int a, int b);

/// <sigma_a^z sigma_b^z> (a != b) or <sigma_a^z> (a == b).
double pair_inversion(const DensityMatrix &rho, int a, int b);

/// Total weight Tr(Pi_{J,M} rho) of each retained (J, M) sector, in the
/// ordinal order of `space`.
std::vector<double> sector_populations(const DensityMatrix &rho, const StateSpace &space);

/// Frobenius distance between rho and its projection onto operators that
/// are uniform mixtures within each (J, M) sector.
double sector_uniformity_defect(const DensityMatrix &rho);

/// Expectation value of an operator given in the same basis.
std::complex<double> expect(const DensityMatrix &rho, const Eigen::MatrixXcd &op);

/// rho(t) = exp(L t) rho0 via a dense matrix exponential.
DensityMatrix evolve(const ModelParams &p, const DensityMatrix &rho0, double t);

/// d rho / dt = L rho, returned in density-matrix shape.
DensityMatrix time_derivative(const ModelParams &p, const DensityMatrix &rho,
                              const std::vector<double> &couplings = {});

/// Tensor product of single-atom density matrices (2x2, basis {down, up}).
DensityMatrix product_state(const std::vector<Eigen::Matrix2cd> &atoms);

/// All atoms in |down>.
DensityMatrix ground_state(int n_atoms);

} // namespace bcl::oracle
