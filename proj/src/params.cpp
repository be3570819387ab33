#include "bcl/params.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bcl/errors.hpp"

namespace bcl {

double ModelParams::cooperativity() const {
    if (gamma == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return gamma_c / gamma;
}

void ModelParams::validate() const {
    if (n_atoms < 1) {
        throw DomainError("n_atoms must be >= 1, got " + std::to_string(n_atoms));
    }
    const auto check = [](double v, const char *name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DomainError(std::string(name) + " must be finite and non-negative");
        }
    };
    check(gamma, "gamma");
    check(w, "w");
    check(gamma_c, "gamma_c");
    check(t2_inv, "t2_inv");
}

ModelParams ModelParams::from_cooperativity(int n_atoms, double cooperativity, double w,
                                            double t2_inv) {
    if (!(cooperativity > 0.0)) {
        throw DomainError("cooperativity must be positive");
    }
    ModelParams p;
    p.n_atoms = n_atoms;
    p.gamma_c = 1.0;
    p.gamma = 1.0 / cooperativity;
    p.w = w;
    p.t2_inv = t2_inv;
    p.validate();
    return p;
}

DerivedGammas derived_gammas(const ModelParams &p) {
    const double loss = p.gamma + p.gamma_c;
    return {p.w + loss, p.w - loss};
}

EffectivePump effective_pump_rates(const PumpLevelScheme &s) {
    if (!(s.omega_p > 0.0 && s.gamma_p > 0.0 && s.gamma_a > 0.0 && s.big_gamma > 0.0)) {
        throw DomainError("pump scheme fields must all be positive");
    }
    const double denom = s.big_gamma * (s.gamma_p + s.gamma_a);
    const double omega2 = s.omega_p * s.omega_p;
    EffectivePump out;
    out.w = omega2 * s.gamma_p / denom;
    out.t2_inv = omega2 * s.gamma_a / (4.0 * denom);
    out.alpha = s.gamma_a / (4.0 * s.gamma_p);
    return out;
}

} // namespace bcl
