#include "bcl/inhomogeneous.hpp"

#include <cmath>
#include <numbers>

#include "bcl/errors.hpp"

namespace bcl {

int InhomConfig::total_atoms() const {
    int n = 0;
    for (int c : counts) {
        n += c;
    }
    return n;
}

InhomConfig InhomConfig::uniform(int n_atoms, int bins) {
    if (bins < 1 || n_atoms < 1) {
        throw DomainError("uniform bins need at least one bin and one atom");
    }
    InhomConfig c;
    for (int m = 1; m <= bins; ++m) {
        c.positions.push_back(2.0 * std::numbers::pi * (m - 0.5) / bins);
        c.counts.push_back(n_atoms / bins + (m <= n_atoms % bins ? 1 : 0));
    }
    return c;
}

InhomConfig InhomConfig::single(int n_atoms, double theta) { return {{theta}, {n_atoms}}; }

double InhomConfig::coupling(int n, int m, double gamma_c) const {
    return gamma_c * std::cos(positions[static_cast<std::size_t>(n)]) *
           std::cos(positions[static_cast<std::size_t>(m)]);
}

Eigen::MatrixXd InhomConfig::coupling_matrix(double gamma_c) const {
    Eigen::MatrixXd g(bins(), bins());
    for (int n = 0; n < bins(); ++n) {
        for (int m = 0; m < bins(); ++m) {
            g(n, m) = coupling(n, m, gamma_c);
        }
    }
    return g;
}

void InhomConfig::validate(int n_atoms) const {
    if (positions.empty()) {
        throw DomainError("inhomogeneous configuration has no bins");
    }
    if (positions.size() != counts.size()) {
        throw DomainError("bin positions and counts differ in length");
    }
    for (int c : counts) {
        if (c < 0) {
            throw DomainError("negative atom count in a bin");
        }
    }
    for (double t : positions) {
        if (!std::isfinite(t)) {
            throw DomainError("bin position is not finite");
        }
    }
    if (total_atoms() != n_atoms) {
        throw DomainError("bin counts sum to " + std::to_string(total_atoms()) + ", expected " +
                          std::to_string(n_atoms));
    }
}

InhomState InhomState::all_down(int bins) {
    return {Eigen::VectorXd::Constant(bins, -1.0), Eigen::MatrixXd::Zero(bins, bins),
            Eigen::MatrixXd::Ones(bins, bins)};
}

Eigen::VectorXd inhom_x(const InhomState &s, const InhomConfig &cfg) {
    const int m = cfg.bins();
    Eigen::VectorXd weight(m);
    for (int k = 0; k < m; ++k) {
        weight(k) = cfg.counts[static_cast<std::size_t>(k)] *
                    std::cos(cfg.positions[static_cast<std::size_t>(k)]);
    }
    return s.spm * weight / static_cast<double>(cfg.total_atoms());
}

InhomState inhom_rhs(const InhomState &s, const InhomConfig &cfg, const ModelParams &p) {
    const int m = cfg.bins();
    const double gc = p.gamma_c;
    const double base = p.w + p.gamma;
    const double drive = p.w - p.gamma;
    const double deph = 4.0 * p.t2_inv;

    Eigen::VectorXd c(m);
    Eigen::VectorXd nc(m);
    for (int k = 0; k < m; ++k) {
        c(k) = std::cos(cfg.positions[static_cast<std::size_t>(k)]);
        nc(k) = cfg.counts[static_cast<std::size_t>(k)] * c(k);
    }
    // a(k) = sum_m N_m c_m spm(k, m); the delta corrections are removed
    // term by term below.
    const Eigen::VectorXd a = s.spm * nc;

    InhomState d{Eigen::VectorXd(m), Eigen::MatrixXd(m, m), Eigen::MatrixXd(m, m)};
    for (int k = 0; k < m; ++k) {
        const double gkk = gc * c(k) * c(k);
        d.sz(k) = -(base + gkk) * s.sz(k) + (drive - gkk) -
                  2.0 * gc * c(k) * (a(k) - c(k) * s.spm(k, k));
    }
    for (int k = 0; k < m; ++k) {
        for (int q = k; q < m; ++q) {
            const double gkk = gc * c(k) * c(k);
            const double gqq = gc * c(q) * c(q);
            const double gkq = gc * c(k) * c(q);
            const double decay = base + 0.5 * (gkk + gqq);
            // sum_m (N_m - d_km - d_qm) c_m spm(m, q), and the same with k, q swapped.
            const double sum_q = a(q) - c(k) * s.spm(k, q) - c(q) * s.spm(q, q);
            const double sum_k = a(k) - c(k) * s.spm(k, k) - c(q) * s.spm(k, q);

            const double dspm = -(decay + deph) * s.spm(k, q) + 0.5 * gkq * s.szz(k, q) +
                                0.25 * gkq * (s.sz(k) + s.sz(q)) +
                                0.5 * gc * (c(k) * s.sz(k) * sum_q + c(q) * s.sz(q) * sum_k);
            const double dszz = -2.0 * decay * s.szz(k, q) + (drive - gkk) * s.sz(q) +
                                (drive - gqq) * s.sz(k) -
                                2.0 * gc * (c(k) * s.sz(q) * sum_k + c(q) * s.sz(k) * sum_q) +
                                4.0 * gkq * s.spm(k, q);
            d.spm(k, q) = d.spm(q, k) = dspm;
            d.szz(k, q) = d.szz(q, k) = dszz;
        }
    }
    return d;
}

namespace {

Eigen::Index packed_size(int m) { return m + m * (m + 1); }

Eigen::VectorXd pack(const InhomState &s) {
    const int m = static_cast<int>(s.sz.size());
    Eigen::VectorXd x(packed_size(m));
    Eigen::Index i = 0;
    for (int k = 0; k < m; ++k) {
        x(i++) = s.sz(k);
    }
    for (int k = 0; k < m; ++k) {
        for (int q = k; q < m; ++q) {
            x(i++) = s.spm(k, q);
            x(i++) = s.szz(k, q);
        }
    }
    return x;
}

InhomState unpack(const Eigen::VectorXd &x, int m) {
    InhomState s{Eigen::VectorXd(m), Eigen::MatrixXd(m, m), Eigen::MatrixXd(m, m)};
    Eigen::Index i = 0;
    for (int k = 0; k < m; ++k) {
        s.sz(k) = x(i++);
    }
    for (int k = 0; k < m; ++k) {
        for (int q = k; q < m; ++q) {
            s.spm(k, q) = s.spm(q, k) = x(i++);
            s.szz(k, q) = s.szz(q, k) = x(i++);
        }
    }
    return s;
}

} // namespace

RelaxationOptions inhom_relaxation_options() {
    RelaxationOptions o;
    o.rtol = 1e-2;
    o.atol = 1e-4;
    o.jacobian_every = 8;
    return o;
}

InhomState inhom_steady(const InhomConfig &cfg, const ModelParams &p,
                        const RelaxationOptions &opts, RelaxationResult *diagnostics) {
    p.validate();
    cfg.validate(p.n_atoms);
    const int m = cfg.bins();

    const RhsFunction f = [&](const Eigen::VectorXd &x, Eigen::VectorXd &dx) {
        dx = pack(inhom_rhs(unpack(x, m), cfg, p));
    };
    InhomState scale_state{Eigen::VectorXd::Ones(m),
                           Eigen::MatrixXd::Constant(m, m, 1.0 / p.n_atoms),
                           Eigen::MatrixXd::Ones(m, m)};
    const RelaxationResult r =
        relax_to_steady(f, pack(InhomState::all_down(m)), pack(scale_state), opts);
    if (diagnostics) {
        *diagnostics = r;
    }
    return unpack(r.x, m);
}

InhomObservables inhom_observables(const InhomState &s, const InhomConfig &cfg,
                                   const ModelParams &p) {
    const int m = cfg.bins();
    const double n = cfg.total_atoms();
    InhomObservables o;
    o.n_atoms = cfg.total_atoms();
    double incoherent = 0.0;
    double coherent = 0.0;
    for (int a = 0; a < m; ++a) {
        const double na = cfg.counts[static_cast<std::size_t>(a)];
        o.jz_mean += 0.5 * na * s.sz(a);
        incoherent += cfg.coupling(a, a, p.gamma_c) * 0.5 * na * (1.0 + s.sz(a));
        for (int b = 0; b < m; ++b) {
            const double nb = cfg.counts[static_cast<std::size_t>(b)];
            const double pairs = na * nb - (a == b ? na : 0.0);
            coherent += cfg.coupling(a, b, p.gamma_c) * pairs * s.spm(a, b);
        }
    }
    o.power = incoherent + coherent;
    o.sf = coherent / (n * p.gamma_c);
    o.sigz_mean = o.jz_mean / (0.5 * n);
    return o;
}

} // namespace bcl
