#include "bcl/ed_driver.hpp"

#include <algorithm>
#include <cmath>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

struct Truncation {
    int j_max; // in units of J, not 2J
    int depth;
};

Truncation clamp(const Truncation &t, int n) {
    return {std::clamp(t.j_max, 1, std::max(1, n / 2 + 1)), std::clamp(t.depth, 1, n + 1)};
}

std::shared_ptr<const StateSpace> space_for(int n, const Truncation &t) {
    const int two_j = std::min(n, 2 * t.j_max + n % 2);
    std::optional<int> depth;
    if (t.depth < n) {
        depth = t.depth;
    }
    return std::make_shared<const StateSpace>(build_space(n, two_j, depth));
}

struct Extent {
    int j_max = 0;
    int depth = 0;
};

// Largest J and depth carrying more than 1e-20 of the peak population.
Extent populated_extent(const PopulationVector &pv) {
    const double peak = *std::max_element(pv.p.begin(), pv.p.end());
    Extent e;
    for (std::size_t k = 0; k < pv.p.size(); ++k) {
        if (pv.p[k] > 1e-20 * peak) {
            const DickeIndex s = pv.space->state(k);
            e.j_max = std::max(e.j_max, (s.two_j + 1) / 2);
            e.depth = std::max(e.depth, s.depth());
        }
    }
    return e;
}

bool covers_everything(int n, const Truncation &t) {
    return 2 * t.j_max + n % 2 >= n && t.depth >= n;
}

} // namespace

double observable_drift(const ObservablesRecord &a, const ObservablesRecord &b) {
    const double n = std::max(1, a.n_atoms);
    double d = std::max({std::abs(a.jpjm - b.jpjm) / n, std::abs(a.jz_var - b.jz_var) / n,
                         std::abs(a.sigz_mean - b.sigz_mean), std::abs(a.sf - b.sf),
                         std::abs(a.xi2 - b.xi2)});
    if (a.g2.has_value() != b.g2.has_value()) {
        return std::numeric_limits<double>::infinity();
    }
    if (a.g2 && b.g2) {
        d = std::max(d, std::abs(*a.g2 - *b.g2) / std::max(std::abs(*b.g2), 1.0));
    }
    return d;
}

EdResult ed_steady(const ModelParams &p, const std::shared_ptr<const StateSpace> &space,
                   const SteadyOptions &opts) {
    p.validate();
    if (space->n_atoms() != p.n_atoms) {
        throw DomainError("state space was built for a different atom number");
    }
    EdResult r;
    r.populations = steady_state(build_rate_matrix(p, space), opts);
    r.obs = compute_observables(r.populations);
    r.two_j_max = space->two_j_max();
    r.depth_max = space->depth_max();
    r.rounds = 1;
    return r;
}

EdResult ed_steady(const ModelParams &p, const TruncationPolicy &policy,
                   const SteadyOptions &opts) {
    p.validate();
    const int n = p.n_atoms;
    if (!policy.automatic) {
        return ed_steady(p, std::make_shared<const StateSpace>(
                                build_space(n, policy.two_j_max, policy.depth_max)),
                         opts);
    }

    SteadyOptions quiet = opts;
    quiet.leak_warning = std::numeric_limits<double>::infinity();

    const int start = static_cast<int>(std::max(64.0, std::ceil(4.0 * std::sqrt(n))));
    Truncation t = clamp({policy.two_j_max ? (*policy.two_j_max + 1) / 2 : start,
                          policy.depth_max.value_or(start)},
                         n);
    bool j_leaked = false;
    bool d_leaked = false;
    std::optional<EdResult> previous;
    for (int round = 1; round <= policy.max_rounds; ++round) {
        EdResult cur = ed_steady(p, space_for(n, t), quiet);
        cur.rounds = round;
        if (covers_everything(n, t)) {
            return cur;
        }
        const Extent ext = populated_extent(cur.populations);
        // A rim that never leaked is trimmed to the populated region plus a
        // margin, so growing the other direction stays affordable.
        const Truncation trimmed = clamp({std::min(t.j_max, ext.j_max + ext.j_max / 4 + 8),
                                          std::min(t.depth, ext.depth + ext.depth / 4 + 8)},
                                         n);
        const double leak_j = cur.populations.leaked_flux_ladder;
        const double leak_d = cur.populations.leaked_flux_depth;

        if (leak_j + leak_d >= policy.leak_tol) {
            const bool grow_j = leak_j >= 0.5 * policy.leak_tol || leak_d < 0.5 * policy.leak_tol;
            const bool grow_d = leak_d >= 0.5 * policy.leak_tol;
            j_leaked = j_leaked || grow_j;
            d_leaked = d_leaked || grow_d;
            Truncation next = t;
            next.j_max = grow_j ? 2 * t.j_max : (j_leaked ? t.j_max : trimmed.j_max);
            next.depth = grow_d ? 2 * t.depth : (d_leaked ? t.depth : trimmed.depth);
            t = clamp(next, n);
            previous.reset();
            continue;
        }
        if (!previous) {
            // Confirm against a smaller basis that still holds the bulk.
            const Truncation ref = clamp({std::max(trimmed.j_max, t.j_max / 2),
                                          std::max(trimmed.depth, t.depth / 2)},
                                         n);
            if (ref.j_max < t.j_max || ref.depth < t.depth) {
                previous = ed_steady(p, space_for(n, ref), quiet);
            }
        }
        if (previous) {
            cur.drift = observable_drift(cur.obs, previous->obs);
            if (cur.drift < policy.drift_tol) {
                return cur;
            }
        }
        previous = cur;
        t = clamp({t.j_max * 2, t.depth * 2}, n);
    }
    throw SolverError("automatic truncation did not converge within " +
                          std::to_string(policy.max_rounds) + " rounds",
                      std::numeric_limits<double>::infinity());
}

} // namespace bcl
