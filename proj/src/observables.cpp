#include "bcl/observables.hpp"

#include <algorithm>

#include "bcl/errors.hpp"

namespace bcl {

ObservablesRecord assemble_observables(int n_atoms, double jz_mean, double jz2_mean, double jpjm,
                                       std::optional<double> jp2jm2, double j2_mean) {
    const double n = n_atoms;
    ObservablesRecord r;
    r.n_atoms = n_atoms;
    r.jz_mean = jz_mean;
    r.jz_var = std::max(0.0, jz2_mean - jz_mean * jz_mean);
    r.jpjm = jpjm;
    r.jp2jm2 = jp2jm2;
    r.j2_mean = j2_mean;
    r.sf = (jpjm - (0.5 * n + jz_mean)) / n;
    r.xi2 = (j2_mean - jz_mean * jz_mean) / (0.5 * n);
    r.sigz_mean = 2.0 * jz_mean / n;
    r.spm_corr = n_atoms > 1 ? r.sf / (n - 1.0) : 0.0;
    r.g2_denominator = jpjm * jpjm;
    if (jp2jm2) {
        r.g2_numerator = *jp2jm2;
        if (r.g2_denominator > 0.0) {
            r.g2 = r.g2_numerator / r.g2_denominator;
        }
    }
    return r;
}

ObservablesRecord compute_observables(const PopulationVector &pv) {
    if (!pv.space || pv.p.size() != pv.space->size()) {
        throw DomainError("population vector does not match its state space");
    }
    double mz = 0.0, mz2 = 0.0, pm = 0.0, pm2 = 0.0, j2 = 0.0;
    for (std::size_t k = 0; k < pv.p.size(); ++k) {
        const double prob = pv.p[k];
        if (prob == 0.0) {
            continue;
        }
        const DickeIndex s = pv.space->state(k);
        const double j = s.j();
        const double m = s.m();
        const double lower = (j + m) * (j - m + 1.0); // J^+ J^-
        mz += prob * m;
        mz2 += prob * m * m;
        pm += prob * lower;
        pm2 += prob * lower * (j + m - 1.0) * (j - m + 2.0);
        j2 += prob * j * (j + 1.0);
    }
    return assemble_observables(pv.space->n_atoms(), mz, mz2, pm, pm2, j2);
}

} // namespace bcl
