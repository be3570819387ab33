#include "bcl/scan_fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace bcl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Named {
    Method method;
    const char *name;
};

constexpr Named kMethods[] = {
    {Method::Ed, "ed"},           {Method::Cumulant2, "cumulant2"},
    {Method::Cumulant3, "cumulant3"}, {Method::MeanField, "meanfield"},
    {Method::Analytic, "analytic"}, {Method::Inhom, "inhom"},
};

ObservablesRecord from_inhom(const InhomObservables &o, double gamma_c) {
    ObservablesRecord r;
    r.n_atoms = o.n_atoms;
    r.jz_mean = o.jz_mean;
    r.jz_var = kNaN;
    r.jpjm = o.power / gamma_c;
    r.j2_mean = kNaN;
    r.sf = o.sf;
    r.xi2 = kNaN;
    r.sigz_mean = o.sigz_mean;
    r.spm_corr = kNaN;
    return r;
}

PointResult evaluate_on(const ModelParams &p0, const MethodSettings &s,
                        const std::shared_ptr<const StateSpace> &space) {
    ModelParams p = p0;
    if (s.alpha) {
        p.t2_inv = *s.alpha * p.w;
    }
    PointResult r;
    r.w = p.w;
    r.t2_inv = p.t2_inv;
    switch (s.method) {
    case Method::Ed:
        r.obs = space ? ed_steady(p, space, s.steady).obs
                      : ed_steady(p, s.truncation, s.steady).obs;
        break;
    case Method::Cumulant2:
    case Method::Cumulant3: {
        const CumulantOrder order =
            s.method == Method::Cumulant2 ? CumulantOrder::Second : CumulantOrder::Third;
        r.obs = observables_from_cumulants(cumulant_steady(p, order, s.relaxation), p.n_atoms);
        break;
    }
    case Method::MeanField:
        r.obs = observables_from_meanfield(meanfield_steady(p), p.n_atoms);
        break;
    case Method::Analytic:
        r.obs = observables_from_analytic(analytic_leading(p), p.n_atoms);
        break;
    case Method::Inhom: {
        if (!s.inhom) {
            throw ConfigError("the inhomogeneous method needs a bin configuration");
        }
        const InhomState st = inhom_steady(*s.inhom, p, s.inhom_relaxation);
        r.inhom = inhom_observables(st, *s.inhom, p);
        r.obs = from_inhom(*r.inhom, p.gamma_c);
        break;
    }
    }
    return r;
}

} // namespace

const char *to_string(Method m) {
    for (const auto &n : kMethods) {
        if (n.method == m) {
            return n.name;
        }
    }
    return "unknown";
}

Method parse_method(const std::string &name) {
    for (const auto &n : kMethods) {
        if (name == n.name) {
            return n.method;
        }
    }
    throw ConfigError("unknown method '" + name + "'");
}

PointResult evaluate(const ModelParams &p, const MethodSettings &s) {
    return evaluate_on(p, s, nullptr);
}

std::vector<double> linear_grid(double start, double stop, int points) {
    if (points < 1) {
        throw DomainError("a grid needs at least one point");
    }
    if (points == 1) {
        if (start != stop) {
            throw DomainError("a single-point grid needs start == stop");
        }
        return {start};
    }
    if (!(stop > start)) {
        throw DomainError("grid stop must exceed start");
    }
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] = start + (stop - start) * i / (points - 1);
    }
    g.back() = stop;
    return g;
}

SweepResult sweep_w(const ModelParams &p, const std::vector<double> &grid,
                    const MethodSettings &s, const SweepOptions &opts) {
    p.validate();
    if (grid.empty()) {
        throw DomainError("empty sweep grid");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
            throw DomainError("sweep grid must be non-negative and strictly increasing");
        }
    }
    if (s.method == Method::Analytic) {
        for (double w : grid) {
            if (!(w > 0.0 && w < p.gamma + p.gamma_c)) {
                throw DomainError("analytic sweep needs every w inside (0, gamma + gamma_c)");
            }
        }
    }

    std::shared_ptr<const StateSpace> space;
    if (s.method == Method::Ed && !s.truncation.automatic) {
        space = std::make_shared<const StateSpace>(
            build_space(p.n_atoms, s.truncation.two_j_max, s.truncation.depth_max));
    }

    SweepResult out;
    out.method = s.method;
    out.params = p;
    out.grid = grid;
    out.points.resize(grid.size());
    std::vector<std::optional<std::string>> errors(grid.size());

    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    const auto work = [&] {
        while (!abort) {
            const std::size_t i = next++;
            if (i >= grid.size()) {
                return;
            }
            ModelParams q = p;
            q.w = grid[i];
            try {
                out.points[i] = evaluate_on(q, s, space);
            } catch (const std::exception &e) {
                errors[i] = e.what();
                if (!opts.keep_going) {
                    abort = true;
                }
            }
        }
    };
    const int threads = std::clamp(opts.threads, 1, static_cast<int>(grid.size()));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
        for (auto &t : pool) {
            t.join();
        }
    }

    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (errors[i]) {
            if (!opts.keep_going) {
                throw PointFailure(grid[i], *errors[i]);
            }
            out.failures.push_back({grid[i], *errors[i]});
        }
    }
    return out;
}

MinimumResult minimize_scalar(const std::function<double(double)> &f, double lo, double hi,
                              const MinimizeOptions &opts) {
    if (!(hi > lo)) {
        throw DomainError("minimisation bracket must have hi > lo");
    }
    if (opts.coarse_points < 3) {
        throw DomainError("coarse grid needs at least three points");
    }
    MinimumResult r;
    const std::vector<double> grid = linear_grid(lo, hi, opts.coarse_points);
    std::vector<double> values;
    for (double x : grid) {
        values.push_back(f(x));
        ++r.evaluations;
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    if (best == 0 || best + 1 == grid.size()) {
        throw BracketError("minimum lies at the bracket end w=" + std::to_string(grid[best]));
    }

    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = grid[best - 1];
    double b = grid[best + 1];
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    r.evaluations += 2;
    while (b - a > opts.rel_tol * std::max(std::abs(grid[best]), 1e-300)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        ++r.evaluations;
    }
    r.w_star = fc < fd ? c : d;
    r.value = std::min(fc, fd);
    if (values[best] < r.value) {
        r.w_star = grid[best];
        r.value = values[best];
    }
    return r;
}

MinimumResult find_min(const ModelParams &p, const MethodSettings &s,
                       const ObservableSelector &select, double lo, double hi,
                       const MinimizeOptions &opts) {
    p.validate();
    return minimize_scalar(
        [&](double w) {
            ModelParams q = p;
            q.w = w;
            try {
                return select(evaluate(q, s));
            } catch (const PointFailure &) {
                throw;
            } catch (const SolverError &e) {
                throw PointFailure(w, e.what());
            }
        },
        lo, hi, opts);
}

MinimumResult find_min_xi2(const ModelParams &p, const MethodSettings &s,
                           std::optional<std::pair<double, double>> bracket,
                           const MinimizeOptions &opts) {
    const auto [lo, hi] = bracket.value_or(std::pair{0.8 * p.gamma, 1.2 * p.gamma});
    if (s.method == Method::Analytic && lo < p.gamma && p.gamma < hi) {
        // xi2 decreases towards gamma from below, jumps, and grows from zero
        // above; the infimum is the upper-branch value at w = gamma.
        ModelParams q = p;
        q.w = p.gamma;
        MinimumResult r;
        r.w_star = p.gamma;
        r.value = evaluate(q, s).obs.xi2;
        r.evaluations = 1;
        r.boundary = true;
        return r;
    }
    return find_min(p, s, [](const PointResult &r) { return r.obs.xi2; }, lo, hi, opts);
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>> &points) {
    if (points.size() < 3) {
        throw DomainError("a power-law fit needs at least three points");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto &[n, v] : points) {
        if (!(n > 0.0) || !(v > 0.0)) {
            throw DomainError("power-law fit needs positive abscissae and values");
        }
        const double x = std::log(n);
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(points.size());
    const double denom = m * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) {
        throw DomainError("power-law fit needs at least two distinct abscissae");
    }
    PowerLawFit fit;
    fit.exponent = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / m;
    fit.prefactor = std::exp(intercept);
    double ss = 0.0;
    for (const auto &[n, v] : points) {
        const double e = std::log(v) - (intercept + fit.exponent * std::log(n));
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / m);
    fit.points_used = static_cast<int>(points.size());
    return fit;
}

} // namespace bcl
