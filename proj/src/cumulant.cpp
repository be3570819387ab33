#include "bcl/cumulant.hpp"

#include <cmath>
#include <limits>

#include "bcl/errors.hpp"

namespace bcl {

const char *to_string(CumulantOrder o) {
    switch (o) {
    case CumulantOrder::MeanField:
        return "meanfield";
    case CumulantOrder::Second:
        return "cumulant2";
    case CumulantOrder::Third:
        return "cumulant3";
    }
    return "unknown";
}

CumulantState CumulantState::all_down(CumulantOrder order) {
    CumulantState s;
    s.order = order;
    return s;
}

CumulantState hierarchy_rhs(const CumulantState &s, const FourAtomMoments &four,
                            const ModelParams &p) {
    const auto [gp, gm] = derived_gammas(p);
    const double gc = p.gamma_c;
    const double n = p.n_atoms;
    const double deph = 4.0 * p.t2_inv;

    CumulantState d;
    d.order = s.order;
    d.sz = -gp * s.sz + gm - 2.0 * (n - 1.0) * gc * s.spm;
    d.spm = -(gp + deph) * s.spm + 0.5 * gc * (s.sz + s.szz) + (n - 2.0) * gc * s.spmz;
    d.szz = -2.0 * gp * s.szz + 2.0 * gm * s.sz + 4.0 * gc * s.spm -
            4.0 * (n - 2.0) * gc * s.spmz;
    d.spmz = -(2.0 * (gp + gc) + deph) * s.spmz + (gm - gc) * s.spm +
             0.5 * gc * (s.szz + s.szzz) + (n - 3.0) * gc * four.spmzz -
             2.0 * (n - 3.0) * gc * four.spmpm;
    d.szzz = -3.0 * gp * s.szzz + 3.0 * gm * s.szz + 12.0 * gc * s.spmz -
             6.0 * (n - 3.0) * gc * four.spmzz;
    return d;
}

CumulantState cumulant2_rhs(const CumulantState &s, const ModelParams &p) {
    CumulantState closed = s;
    closed.spmz = s.spm * s.sz;
    CumulantState d = hierarchy_rhs(closed, {}, p);
    d.spmz = 0.0;
    d.szzz = 0.0;
    d.order = CumulantOrder::Second;
    return d;
}

CumulantState cumulant3_rhs(const CumulantState &s, const ModelParams &p) {
    FourAtomMoments four;
    four.spmpm = 2.0 * s.spm * s.spm;
    four.spmzz = s.spm * s.szz + 2.0 * s.spmz * s.sz - 2.0 * s.spm * s.sz * s.sz;
    CumulantState d = hierarchy_rhs(s, four, p);
    d.order = CumulantOrder::Third;
    return d;
}

CumulantState cumulant_steady(const ModelParams &p, CumulantOrder order,
                              const RelaxationOptions &opts, RelaxationResult *diagnostics) {
    p.validate();
    if (order == CumulantOrder::MeanField) {
        throw DomainError("cumulant_steady handles orders 2 and 3; use meanfield_steady");
    }
    const bool third = order == CumulantOrder::Third;
    const Eigen::Index dim = third ? 5 : 3;
    const double inv_n = 1.0 / p.n_atoms;

    const auto unpack = [&](const Eigen::VectorXd &x) {
        CumulantState s = CumulantState::all_down(order);
        s.sz = x(0);
        s.spm = x(1);
        s.szz = x(2);
        if (third) {
            s.spmz = x(3);
            s.szzz = x(4);
        }
        return s;
    };
    const RhsFunction f = [&](const Eigen::VectorXd &x, Eigen::VectorXd &dx) {
        const CumulantState s = unpack(x);
        const CumulantState d = third ? cumulant3_rhs(s, p) : cumulant2_rhs(s, p);
        dx.resize(dim);
        dx(0) = d.sz;
        dx(1) = d.spm;
        dx(2) = d.szz;
        if (third) {
            dx(3) = d.spmz;
            dx(4) = d.szzz;
        }
    };

    const CumulantState start = CumulantState::all_down(order);
    Eigen::VectorXd x0(dim), scale(dim);
    x0(0) = start.sz;
    x0(1) = start.spm;
    x0(2) = start.szz;
    scale << Eigen::VectorXd::Ones(dim);
    scale(1) = inv_n;
    if (third) {
        x0(3) = start.spmz;
        x0(4) = start.szzz;
        scale(3) = inv_n;
    }

    const RelaxationResult r = relax_to_steady(f, x0, scale, opts);
    if (diagnostics) {
        *diagnostics = r;
    }
    return unpack(r.x);
}

ObservablesRecord observables_from_cumulants(const CumulantState &s, int n_atoms) {
    const double n = n_atoms;
    const double jz = 0.5 * n * s.sz;
    const double var = 0.25 * n * (1.0 - s.sz * s.sz) + 0.25 * n * (n - 1.0) * (s.szz - s.sz * s.sz);
    const double jpjm = n * (n - 1.0) * s.spm + 0.5 * n * (1.0 + s.sz);
    // <J^2> = <J+J-> - <Jz> + <Jz^2>
    const double j2 = jpjm - jz + var + jz * jz;
    ObservablesRecord r = assemble_observables(n_atoms, jz, var + jz * jz, jpjm, std::nullopt, j2);
    r.jz_var = var;
    r.xi2 = 1.5 + 2.0 * (n - 1.0) * s.spm + 0.5 * (n - 1.0) * s.szz - 0.5 * n * s.sz * s.sz;
    r.spm_corr = s.spm;
    return r;
}

MeanFieldState meanfield_rhs(const MeanFieldState &s, const ModelParams &p) {
    const auto [gp, gm] = derived_gammas(p);
    const double k = (p.n_atoms - 1.0) * p.gamma_c;
    MeanFieldState d;
    d.sp = -(0.5 * gp + 2.0 * p.t2_inv) * s.sp + 0.5 * k * s.sp * s.sz;
    d.sz = -gp * s.sz + gm - 2.0 * k * s.sp * s.sp;
    return d;
}

double MeanFieldBranch::polarization() const { return sp_abs2 > 0.0 ? std::sqrt(sp_abs2) : 0.0; }

MeanFieldSolution meanfield_steady(const ModelParams &p) {
    p.validate();
    const auto [gp, gm] = derived_gammas(p);
    MeanFieldSolution out;
    out.unpolarized = {gp > 0.0 ? gm / gp : -1.0, 0.0};
    const double k = (p.n_atoms - 1.0) * p.gamma_c;
    if (k > 0.0) {
        const double sz = (gp + 4.0 * p.t2_inv) / k;
        out.polarized = {sz, (gm - gp * sz) / (2.0 * k)};
    } else {
        out.polarized = {std::numeric_limits<double>::quiet_NaN(), -1.0};
    }
    out.polarized_selected = out.polarized.sp_abs2 > 0.0;
    return out;
}

ObservablesRecord observables_from_meanfield(const MeanFieldSolution &mf, int n_atoms) {
    const MeanFieldBranch &b = mf.selected();
    CumulantState s;
    s.order = CumulantOrder::MeanField;
    s.sz = b.sz;
    s.spm = b.polarization() * b.polarization();
    s.szz = b.sz * b.sz;
    return observables_from_cumulants(s, n_atoms);
}

AnalyticRecord analytic_leading(const ModelParams &p) {
    p.validate();
    const double w = p.w;
    const double g = p.gamma;
    const double gc = p.gamma_c;
    const double n = p.n_atoms;
    if (!(w > 0.0 && w < g + gc)) {
        throw DomainError("leading-order formulas need 0 < w < gamma + gamma_c");
    }
    AnalyticRecord a;
    if (w < g) {
        a.regime = Regime::Below;
        a.sz0 = (w - g) / (w + g);
        a.spm1 = -w / (n * (w + g));
        a.jpjm0 = 0.0;
        a.xi2_1 = (3.0 * g - w) / (2.0 * (w + g)) - 0.5 * a.sz0 * a.sz0;
    } else {
        a.regime = Regime::Above;
        a.sz0 = 0.0;
        a.spm1 = derived_gammas(p).gamma_minus / (2.0 * n * gc);
        a.jpjm0 = n * (w - g) / (2.0 * gc);
        a.xi2_1 = 1.5 * (w - g) / gc;
    }
    a.sf = n * a.spm1;
    return a;
}

ObservablesRecord observables_from_analytic(const AnalyticRecord &a, int n_atoms) {
    const double n = n_atoms;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ObservablesRecord r;
    r.n_atoms = n_atoms;
    r.jz_mean = 0.5 * n * a.sz0;
    r.jz_var = nan;
    r.jpjm = a.jpjm0;
    r.j2_mean = nan;
    r.sf = a.sf;
    r.xi2 = a.xi2_1;
    r.sigz_mean = a.sz0;
    r.spm_corr = a.spm1;
    return r;
}

} // namespace bcl
