#pragma once

// Model parameters of the incoherently pumped bad-cavity laser. All rates are
// measured in units of the collective cavity emission rate gamma_c.

namespace bcl {

struct ModelParams {
    int n_atoms = 2;
    double gamma = 0.1;   // free-space decay
    double w = 0.1;       // incoherent repump
    double gamma_c = 1.0; // cavity-mediated collective decay
    double t2_inv = 0.0;  // single-atom dephasing 1/T2

    /// C = gamma_c / gamma; infinite when gamma == 0.
    double cooperativity() const;

    /// Throws DomainError on negative rates or n_atoms < 1.
    void validate() const;

    /// Convenience: gamma_c = 1, gamma = 1 / cooperativity.
    static ModelParams from_cooperativity(int n_atoms, double cooperativity, double w,
                                          double t2_inv = 0.0);
};

struct DerivedGammas {
    double gamma_plus;
    double gamma_minus;
};

/// Gamma_{+-} = w +- (gamma + gamma_c).
DerivedGammas derived_gammas(const ModelParams &p);

/// Three-level repump: |down> -> |a> driven at Rabi frequency omega_p, |a>
/// decays to |up> at gamma_p and back to |down> at gamma_a. big_gamma is the
/// total broadening of the driven transition and is taken as an input.
struct PumpLevelScheme {
    double omega_p;
    double gamma_p;
    double gamma_a;
    double big_gamma;
};

struct EffectivePump {
    double w;
    double t2_inv;
    double alpha; // 1 / (w T2)
};

/// Adiabatic elimination of |a>. Throws DomainError for non-positive fields.
EffectivePump effective_pump_rates(const PumpLevelScheme &s);

} // namespace bcl
