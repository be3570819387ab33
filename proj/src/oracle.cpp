#include "bcl/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "bcl/errors.hpp"

namespace bcl::oracle {

namespace {

using Mat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

int dim(int n_atoms) { return 1 << n_atoms; }

void require_size(int n_atoms) {
    if (n_atoms < 1 || n_atoms > kMaxAtoms) {
        throw CapabilityError("brute-force Liouvillian supports 1 <= N <= " +
                              std::to_string(kMaxAtoms) + ", got N=" + std::to_string(n_atoms));
    }
}

Mat sigma_minus(int n_atoms, int atom) {
    const int d = dim(n_atoms);
    Mat m = Mat::Zero(d, d);
    for (int b = 0; b < d; ++b) {
        if (b & (1 << atom)) {
            m(b ^ (1 << atom), b) = 1.0;
        }
    }
    return m;
}

Mat sigma_plus(int n_atoms, int atom) { return sigma_minus(n_atoms, atom).transpose(); }

Mat sigma_z(int n_atoms, int atom) {
    const int d = dim(n_atoms);
    Mat m = Mat::Zero(d, d);
    for (int b = 0; b < d; ++b) {
        m(b, b) = (b & (1 << atom)) ? 1.0 : -1.0;
    }
    return m;
}

Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// D[O] rho = O rho O^dag - {O^dag O, rho}/2 in column-stacked form.
Mat dissipator(const Mat &o) {
    const Mat id = Mat::Identity(o.rows(), o.cols());
    const Mat ooo = o.adjoint() * o;
    return kron(o.conjugate(), o) - 0.5 * kron(id, ooo) - 0.5 * kron(ooo.transpose(), id);
}

struct Collective {
    Mat jx, jy, jz, jp, jm;
};

Collective collective(int n_atoms) {
    const int d = dim(n_atoms);
    Collective c{Mat::Zero(d, d), Mat::Zero(d, d), Mat::Zero(d, d), Mat::Zero(d, d),
                 Mat::Zero(d, d)};
    const cplx i(0.0, 1.0);
    for (int a = 0; a < n_atoms; ++a) {
        const Mat sp = sigma_plus(n_atoms, a);
        const Mat sm = sigma_minus(n_atoms, a);
        c.jp += sp;
        c.jm += sm;
        c.jx += 0.5 * (sp + sm);
        c.jy += -0.5 * i * (sp - sm);
        c.jz += 0.5 * sigma_z(n_atoms, a);
    }
    return c;
}

DensityMatrix from_vec(int n_atoms, const Eigen::VectorXcd &v) {
    const int d = dim(n_atoms);
    DensityMatrix out;
    out.n_atoms = n_atoms;
    out.rho = Eigen::Map<const Mat>(v.data(), d, d);
    return out;
}

Eigen::VectorXcd to_vec(const DensityMatrix &r) {
    return Eigen::Map<const Eigen::VectorXcd>(r.rho.data(), r.rho.size());
}

struct Sector {
    int two_j;
    int two_m;
    Mat projector;
};

std::vector<Sector> sectors(int n_atoms) {
    const Collective c = collective(n_atoms);
    const Eigen::MatrixXd j2 = (c.jx * c.jx + c.jy * c.jy + c.jz * c.jz).real();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j2);
    const int d = dim(n_atoms);
    std::vector<Sector> out;
    for (int two_j = n_atoms % 2; two_j <= n_atoms; two_j += 2) {
        const double target = 0.25 * two_j * (two_j + 2);
        Mat pj = Mat::Zero(d, d);
        for (int k = 0; k < d; ++k) {
            if (std::abs(es.eigenvalues()(k) - target) < 1e-8) {
                const Eigen::VectorXcd v = es.eigenvectors().col(k).cast<cplx>();
                pj += v * v.adjoint();
            }
        }
        for (int two_m = -two_j; two_m <= two_j; two_m += 2) {
            Mat pm = Mat::Zero(d, d);
            for (int b = 0; b < d; ++b) {
                const int ups = __builtin_popcount(static_cast<unsigned>(b));
                if (2 * ups - n_atoms == two_m) {
                    pm(b, b) = 1.0;
                }
            }
            out.push_back({two_j, two_m, pm * pj * pm});
        }
    }
    return out;
}

} // namespace

Mat build_liouvillian(const ModelParams &p, const std::vector<double> &couplings) {
    p.validate();
    require_size(p.n_atoms);
    const int n = p.n_atoms;
    if (!couplings.empty() && static_cast<int>(couplings.size()) != n) {
        throw DomainError("one coupling weight per atom required");
    }
    const int d = dim(n);
    Mat l = Mat::Zero(d * d, d * d);
    Mat jm = Mat::Zero(d, d);
    for (int a = 0; a < n; ++a) {
        const Mat sm = sigma_minus(n, a);
        const Mat sp = sigma_plus(n, a);
        if (p.w > 0.0) {
            l += p.w * dissipator(sp);
        }
        if (p.gamma > 0.0) {
            l += p.gamma * dissipator(sm);
        }
        if (p.t2_inv > 0.0) {
            l += p.t2_inv * dissipator(sigma_z(n, a));
        }
        jm += (couplings.empty() ? 1.0 : couplings[static_cast<std::size_t>(a)]) * sm;
    }
    if (p.gamma_c > 0.0) {
        l += p.gamma_c * dissipator(jm);
    }
    return l;
}

DensityMatrix oracle_steady(const ModelParams &p, const std::vector<double> &couplings) {
    const Mat l = build_liouvillian(p, couplings);
    const Eigen::BDCSVD<Mat> svd(l, Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    const Eigen::Index last = sv.size() - 1;
    if (sv(last - 1) < 1e-9 * sv(0)) {
        throw SolverError("Liouvillian kernel is degenerate", sv(last - 1));
    }
    DensityMatrix r = from_vec(p.n_atoms, svd.matrixV().col(last));
    r.rho /= r.rho.trace();
    r.rho = 0.5 * (r.rho + r.rho.adjoint()).eval();
    return r;
}

cplx expect(const DensityMatrix &rho, const Mat &op) { return (rho.rho * op).trace(); }

ObservablesRecord oracle_observables(const DensityMatrix &r) {
    const int n = r.n_atoms;
    const Collective c = collective(n);
    const double jx = expect(r, c.jx).real();
    const double jy = expect(r, c.jy).real();
    const double jz = expect(r, c.jz).real();
    const double varx = expect(r, c.jx * c.jx).real() - jx * jx;
    const double vary = expect(r, c.jy * c.jy).real() - jy * jy;
    const double jz2 = expect(r, c.jz * c.jz).real();
    const double jpjm = expect(r, c.jp * c.jm).real();
    const double jp2jm2 = expect(r, c.jp * c.jp * c.jm * c.jm).real();
    const double j2 = expect(r, c.jx * c.jx + c.jy * c.jy + c.jz * c.jz).real();

    ObservablesRecord rec = assemble_observables(n, jz, jz2, jpjm, jp2jm2, j2);
    rec.xi2 = (varx + vary + (jz2 - jz * jz)) / (0.5 * n);
    rec.spm_corr = n > 1 ? pair_coherence(r, 0, 1).real() : 0.0;
    return rec;
}

std::complex<double> pair_coherence(const DensityMatrix &r, int a, int b) {
    return expect(r, sigma_plus(r.n_atoms, a) * sigma_minus(r.n_atoms, b));
}

double pair_inversion(const DensityMatrix &r, int a, int b) {
    if (a == b) {
        return expect(r, sigma_z(r.n_atoms, a)).real();
    }
    return expect(r, sigma_z(r.n_atoms, a) * sigma_z(r.n_atoms, b)).real();
}

Moments oracle_moments(const DensityMatrix &r) {
    const int n = r.n_atoms;
    Moments m;
    const Collective c = collective(n);
    m.jx_mean = expect(r, c.jx).real();
    m.jy_mean = expect(r, c.jy).real();
    m.sz = expect(r, sigma_z(n, 0)).real();
    if (n >= 2) {
        const Mat pm = sigma_plus(n, 0) * sigma_minus(n, 1);
        m.spm = expect(r, pm);
        m.szz = expect(r, sigma_z(n, 0) * sigma_z(n, 1)).real();
        if (n >= 3) {
            m.spmz = expect(r, pm * sigma_z(n, 2));
            m.szzz = expect(r, sigma_z(n, 0) * sigma_z(n, 1) * sigma_z(n, 2)).real();
            if (n >= 4) {
                m.spmzz = expect(r, pm * sigma_z(n, 2) * sigma_z(n, 3));
                m.spmpm = expect(r, pm * sigma_plus(n, 2) * sigma_minus(n, 3));
            }
        }
    }
    return m;
}

std::vector<double> sector_populations(const DensityMatrix &r, const StateSpace &space) {
    if (space.n_atoms() != r.n_atoms) {
        throw DomainError("state space and density matrix disagree on N");
    }
    std::vector<double> out(space.size(), 0.0);
    for (const Sector &s : sectors(r.n_atoms)) {
        const DickeIndex idx{s.two_j, s.two_m};
        if (space.contains(idx)) {
            out[space.index(idx)] = expect(r, s.projector).real();
        }
    }
    return out;
}

double sector_uniformity_defect(const DensityMatrix &r) {
    Mat rebuilt = Mat::Zero(r.rho.rows(), r.rho.cols());
    for (const Sector &s : sectors(r.n_atoms)) {
        const double weight = expect(r, s.projector).real();
        const double trace = s.projector.trace().real();
        rebuilt += (weight / trace) * s.projector;
    }
    return (r.rho - rebuilt).norm();
}

DensityMatrix evolve(const ModelParams &p, const DensityMatrix &rho0, double t) {
    const Mat l = build_liouvillian(p);
    const Mat prop = (l * t).exp();
    return from_vec(rho0.n_atoms, prop * to_vec(rho0));
}

DensityMatrix time_derivative(const ModelParams &p, const DensityMatrix &rho,
                              const std::vector<double> &couplings) {
    return from_vec(rho.n_atoms, build_liouvillian(p, couplings) * to_vec(rho));
}

DensityMatrix ground_state(int n_atoms) {
    require_size(n_atoms);
    DensityMatrix r;
    r.n_atoms = n_atoms;
    r.rho = Mat::Zero(dim(n_atoms), dim(n_atoms));
    r.rho(0, 0) = 1.0;
    return r;
}

DensityMatrix product_state(const std::vector<Eigen::Matrix2cd> &atoms) {
    const int n = static_cast<int>(atoms.size());
    require_size(n);
    // Atom j is bit j, so the last atom is the most significant factor.
    Mat rho = Mat::Ones(1, 1);
    for (int a = n - 1; a >= 0; --a) {
        rho = kron(rho, Mat(atoms[static_cast<std::size_t>(a)]));
    }
    DensityMatrix r;
    r.n_atoms = n;
    r.rho = rho;
    return r;
}

} // namespace bcl::oracle
