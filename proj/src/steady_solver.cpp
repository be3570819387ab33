#include "bcl/steady_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

using SolverMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Vec = Eigen::VectorXd;
using Lu = Eigen::SparseLU<SolverMatrix, Eigen::NaturalOrdering<int>>;

constexpr double kClip = 1e-12;
constexpr std::size_t kLeafSize = 64;

struct Site {
    int two_j;
    int two_m;
    int index;
};

// Nested dissection on the (J, M) lattice. Every transition moves J and M by
// at most one, so a single row or column of sites separates the halves.
void dissect(std::vector<Site> &s, std::size_t lo, std::size_t hi, std::vector<int> &order) {
    if (hi - lo <= kLeafSize) {
        for (std::size_t i = lo; i < hi; ++i) {
            order.push_back(s[i].index);
        }
        return;
    }
    int jmin = s[lo].two_j, jmax = jmin, mmin = s[lo].two_m, mmax = mmin;
    for (std::size_t i = lo; i < hi; ++i) {
        jmin = std::min(jmin, s[i].two_j);
        jmax = std::max(jmax, s[i].two_j);
        mmin = std::min(mmin, s[i].two_m);
        mmax = std::max(mmax, s[i].two_m);
    }
    const bool by_j = jmax - jmin >= mmax - mmin;
    const auto key = [by_j](const Site &a) { return by_j ? a.two_j : a.two_m; };
    std::sort(s.begin() + static_cast<long>(lo), s.begin() + static_cast<long>(hi),
              [&](const Site &a, const Site &b) {
                  return key(a) != key(b) ? key(a) < key(b) : a.index < b.index;
              });
    const int cut = key(s[lo + (hi - lo) / 2]);
    std::size_t a = lo;
    while (a < hi && key(s[a]) < cut) {
        ++a;
    }
    std::size_t b = a;
    while (b < hi && key(s[b]) == cut) {
        ++b;
    }
    if (a == lo && b == hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            order.push_back(s[i].index);
        }
        return;
    }
    dissect(s, lo, a, order);
    dissect(s, b, hi, order);
    for (std::size_t i = a; i < b; ++i) {
        order.push_back(s[i].index);
    }
}

// position[k] = place of state k in the elimination order.
std::vector<int> elimination_positions(const StateSpace &space) {
    const long n = space.size();
    std::vector<Site> sites;
    sites.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k) {
        const DickeIndex d = space.state(k);
        sites.push_back({d.two_j, d.two_m, static_cast<int>(k)});
    }
    std::vector<int> order;
    order.reserve(sites.size());
    dissect(sites, 0, sites.size(), order);
    std::vector<int> pos(sites.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    }
    return pos;
}

// Symmetrically permuted copy of r (plus `diag_shift` on the diagonal) with
// row `pin` replaced by the unit row, or no row replaced when pin < 0.
SolverMatrix permuted_system(const RateMatrix::Sparse &r, const std::vector<int> &pos, long pin,
                             double diag_shift) {
    std::vector<Eigen::Triplet<double, int>> t;
    t.reserve(static_cast<std::size_t>(r.nonZeros() + r.cols()));
    for (long col = 0; col < r.outerSize(); ++col) {
        const int pc = pos[static_cast<std::size_t>(col)];
        for (RateMatrix::Sparse::InnerIterator it(r, col); it; ++it) {
            if (it.row() != pin) {
                t.emplace_back(pos[static_cast<std::size_t>(it.row())], pc, it.value());
            }
        }
        if (col != pin && diag_shift != 0.0) {
            t.emplace_back(pc, pc, diag_shift);
        }
    }
    if (pin >= 0) {
        const int pp = pos[static_cast<std::size_t>(pin)];
        t.emplace_back(pp, pp, 1.0);
    }
    SolverMatrix a(static_cast<int>(r.rows()), static_cast<int>(r.cols()));
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
}

void factorize(Lu &lu, const SolverMatrix &a) {
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        throw SolverError("sparse LU factorisation failed: " + lu.lastErrorMessage(),
                          std::numeric_limits<double>::infinity());
    }
}

Vec gather(const Vec &y, const std::vector<int> &pos) {
    Vec x(y.size());
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        x(k) = y(pos[static_cast<std::size_t>(k)]);
    }
    return x;
}

Vec solve_inverse_power(const RateMatrix::Sparse &r, const std::vector<int> &pos, double scale,
                        double tol, int max_iter) {
    const long n = r.rows();
    const double shift = 1e-10 * std::max(scale, 1e-300);
    Lu lu;
    factorize(lu, permuted_system(r, pos, -1, -shift));
    Vec y = Vec::Constant(n, 1.0 / static_cast<double>(n));
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        Vec z = lu.solve(y);
        const double s = z.sum();
        if (!(std::abs(s) > 0.0) || !z.allFinite()) {
            throw SolverError("inverse iteration broke down", residual);
        }
        y = z / s;
        residual = (r * gather(y, pos)).cwiseAbs().maxCoeff();
        if (residual <= tol) {
            break;
        }
    }
    return gather(y, pos);
}

bool usable(const Vec &x) { return x.allFinite() && x.sum() > 0.0; }

Vec solve_pinned(const RateMatrix::Sparse &r, const std::vector<int> &pos, double scale,
                 double tol, int max_iter) {
    const long n = r.rows();
    // First pin: the state with the slowest exit, which is where absorbing
    // and near-absorbing chains park their population.
    long pin = 0;
    double slowest = std::numeric_limits<double>::infinity();
    for (long col = 0; col < r.outerSize(); ++col) {
        for (RateMatrix::Sparse::InnerIterator it(r, col); it; ++it) {
            if (it.row() == col && std::abs(it.value()) < slowest) {
                slowest = std::abs(it.value());
                pin = col;
            }
        }
    }

    Vec x;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const SolverMatrix a = permuted_system(r, pos, pin, 0.0);
        Lu lu;
        factorize(lu, a);
        Vec b = Vec::Zero(n);
        b(pos[static_cast<std::size_t>(pin)]) = 1.0;
        Vec y = lu.solve(b);
        if (y.allFinite()) {
            // One round of iterative refinement on the pinned system.
            const Vec res = b - a * y;
            y += lu.solve(res);
        }
        x = gather(y, pos);
        Eigen::Index best = 0;
        if (!usable(x)) {
            // The pin carries next to no weight and the solve overflowed;
            // locate the bulk with inverse iteration and pin there.
            const Vec guess = solve_inverse_power(r, pos, scale, tol, max_iter);
            guess.maxCoeff(&best);
            if (best == pin) {
                return guess;
            }
            pin = best;
            continue;
        }
        const double peak = x.maxCoeff(&best);
        // A poorly populated pin amplifies round-off; move it to the peak.
        if (best == pin || x(pin) >= 1e-6 * peak) {
            break;
        }
        pin = best;
    }
    return x;
}

} // namespace

PopulationVector steady_state(const RateMatrix &r, const SteadyOptions &opts) {
    const auto &m = r.matrix();
    const long n = m.rows();
    const double scale = r.max_outflow();
    const double tol = opts.tol > 0.0 ? opts.tol : 1e-12 * std::max(scale, 1e-300);

    PopulationVector out;
    out.space = r.space_ptr();

    if (n == 1) {
        out.p = {1.0};
    } else {
        const std::vector<int> pos = elimination_positions(r.space());
        Vec x = opts.method == SteadyMethod::DirectPinned
                    ? solve_pinned(m, pos, scale, tol, opts.max_iterations)
                    : solve_inverse_power(m, pos, scale, tol, opts.max_iterations);
        const double total = x.sum();
        if (!(total > 0.0)) {
            throw SolverError("steady state has non-positive total weight",
                              std::numeric_limits<double>::infinity());
        }
        x /= total;
        const double most_negative = x.minCoeff();
        if (most_negative < -kClip) {
            throw SolverError("steady state has a negative population " +
                                  std::to_string(most_negative),
                              (m * x).cwiseAbs().maxCoeff());
        }
        x = x.cwiseMax(0.0);
        x /= x.sum();
        out.p.assign(x.data(), x.data() + n);
    }

    const Eigen::Map<const Vec> pv(out.p.data(), n);
    out.residual = n == 1 ? 0.0 : (m * pv).cwiseAbs().maxCoeff();
    if (out.residual > tol) {
        throw SolverError("steady-state residual " + std::to_string(out.residual) +
                              " exceeds tolerance " + std::to_string(tol),
                          out.residual);
    }
    for (long k = 0; k < n; ++k) {
        out.leaked_flux_ladder += out.p[static_cast<std::size_t>(k)] *
                                  r.leakage_ladder()[static_cast<std::size_t>(k)];
        out.leaked_flux_depth += out.p[static_cast<std::size_t>(k)] *
                                 r.leakage_depth()[static_cast<std::size_t>(k)];
    }
    out.leaked_flux = out.leaked_flux_ladder + out.leaked_flux_depth;
    if (out.leaked_flux > opts.leak_warning) {
        out.warnings.push_back("truncation leaks " + std::to_string(out.leaked_flux) +
                               " probability per unit time; enlarge the state space");
    }
    return out;
}

} // namespace bcl
