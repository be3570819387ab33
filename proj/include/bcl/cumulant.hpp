#pragma once

// Moment hierarchies for the permutation-symmetric model. Variables are the
// one-, two- and three-atom expectation values
//
//   sz   = <s1z>           spm  = <s1+ s2->        szz  = <s1z s2z>
//   spmz = <s1+ s2- s3z>   szzz = <s1z s2z s3z>
//
// with <s1+ s2-> real by the U(1) symmetry of the dynamics.

#include "bcl/observables.hpp"
#include "bcl/params.hpp"
#include "bcl/relaxation.hpp"

namespace bcl {

enum class CumulantOrder { MeanField, Second, Third };

const char *to_string(CumulantOrder o);

struct CumulantState {
    double sz = -1.0;
    double spm = 0.0;
    double szz = 1.0;
    double spmz = 0.0;
    double szzz = -1.0;
    CumulantOrder order = CumulantOrder::Second;

    /// Every atom in |down>.
    static CumulantState all_down(CumulantOrder order);
};

/// Four-atom moments entering the three-atom equations.
struct FourAtomMoments {
    double spmzz = 0.0; // <s1+ s2- s3z s4z>
    double spmpm = 0.0; // <s1+ s2- s3+ s4->
};

/// Exact (unclosed) equations of motion of the five moments, given the
/// four-atom moments explicitly. Dephasing adds 4/T2 to the decay of every
/// moment carrying one sigma^+ sigma^- pair.
CumulantState hierarchy_rhs(const CumulantState &s, const FourAtomMoments &four,
                            const ModelParams &p);

/// Second order: <s1+ s2- s3z> ~ <s1+ s2-><s1z>. Only sz, spm, szz evolve.
CumulantState cumulant2_rhs(const CumulantState &s, const ModelParams &p);

/// Third order with the four-atom factorisations
///   <s1+ s2- s3+ s4-> ~ 2 <s1+ s2->^2,
///   <s1+ s2- s3z s4z> ~ <s1+ s2-><s1z s2z> + 2 <s1+ s2- s3z><s1z> - 2 <s1+ s2-><s1z>^2.
CumulantState cumulant3_rhs(const CumulantState &s, const ModelParams &p);

/// Steady state from the all-down initial condition (integrate, then Newton).
/// Throws SolverError with diagnostics when nothing converges by t_max.
CumulantState cumulant_steady(const ModelParams &p, CumulantOrder order,
                              const RelaxationOptions &opts = {},
                              RelaxationResult *diagnostics = nullptr);

/// Collective observables reconstructed from one- and two-atom moments. The
/// fourth moment (and hence g2) is not available.
ObservablesRecord observables_from_cumulants(const CumulantState &s, int n_atoms);

// --- mean field -----------------------------------------------------------

struct MeanFieldState {
    double sp = 0.0; // |<s1+>|
    double sz = -1.0;
};

/// d|<s+>|/dt and d<sz>/dt of the product-state ansatz.
MeanFieldState meanfield_rhs(const MeanFieldState &s, const ModelParams &p);

struct MeanFieldBranch {
    double sz;
    double sp_abs2; // may be negative for the unphysical polarised root
    double polarization() const;
};

struct MeanFieldSolution {
    MeanFieldBranch unpolarized;
    MeanFieldBranch polarized;
    bool polarized_selected;
    const MeanFieldBranch &selected() const { return polarized_selected ? polarized : unpolarized; }
};

/// Both fixed points; the polarised one is selected iff its |<s+>|^2 > 0.
MeanFieldSolution meanfield_steady(const ModelParams &p);

/// Product-state observables of the selected mean-field branch.
ObservablesRecord observables_from_meanfield(const MeanFieldSolution &mf, int n_atoms);

// --- leading order in 1/N -------------------------------------------------

enum class Regime { Below, Above };

struct AnalyticRecord {
    double sz0;    // <s1z> at O(1)
    double spm1;   // <s1+ s2-> at O(1/N)
    double jpjm0;  // <J+ J-> at O(N)
    double sf;     // N * spm1
    double xi2_1;  // squeezing parameter at O(1)
    Regime regime; // Below: w < gamma; Above: gamma <= w < gamma + gamma_c
};

/// Leading-order large-N steady state for 0 < w < gamma + gamma_c.
/// Throws DomainError outside that window.
AnalyticRecord analytic_leading(const ModelParams &p);

/// jz_var is not part of the leading-order result and is reported as NaN,
/// as is j2_mean.
ObservablesRecord observables_from_analytic(const AnalyticRecord &a, int n_atoms);

} // namespace bcl
