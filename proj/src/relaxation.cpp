#include "bcl/relaxation.hpp"

#include <Eigen/LU>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr Eigen::Index kDenseLimit = 400;

// Factorises I - c * jac (c > 0) or, with c == 0, -jac for Newton steps.
// Large Jacobians are stored sparse; exact zeros from the finite
// differences are structural.
class Factorization {
  public:
    bool compute(const Mat &jac, double c, bool newton) {
        const Eigen::Index n = jac.rows();
        if (n <= kDenseLimit) {
            Mat a = newton ? Mat(jac) : Mat(Mat::Identity(n, n) - c * jac);
            dense_.compute(a);
            sparse_mode_ = false;
            return std::abs(dense_.determinant()) > 0.0 || n == 0;
        }
        std::vector<Eigen::Triplet<double>> t;
        for (Eigen::Index col = 0; col < n; ++col) {
            for (Eigen::Index row = 0; row < n; ++row) {
                double v = newton ? jac(row, col) : -c * jac(row, col);
                if (!newton && row == col) {
                    v += 1.0;
                }
                if (v != 0.0) {
                    t.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
                }
            }
        }
        Eigen::SparseMatrix<double> a(n, n);
        a.setFromTriplets(t.begin(), t.end());
        a.makeCompressed();
        sparse_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        sparse_->compute(a);
        sparse_mode_ = true;
        return sparse_->info() == Eigen::Success;
    }

    Vec solve(const Vec &b) const {
        if (sparse_mode_) {
            return sparse_->solve(b);
        }
        return dense_.solve(b);
    }

  private:
    bool sparse_mode_ = false;
    Eigen::PartialPivLU<Mat> dense_;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse_;
};

double inf_norm(const Vec &v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Damped Newton from x. Returns true and updates x/fx when ||f|| <= tol.
bool newton_polish(const RhsFunction &f, const Vec &scale, const RelaxationOptions &opts, Vec &x,
                   Vec &fx, int &iterations) {
    Vec trial(x.size());
    Vec ftrial(x.size());
    double norm = inf_norm(fx);
    for (int it = 0; it < opts.max_newton; ++it) {
        if (norm <= opts.rhs_tol) {
            return true;
        }
        ++iterations;
        const Mat jac = numerical_jacobian(f, x, scale);
        Factorization lu;
        if (!lu.compute(jac, 0.0, true)) {
            return false;
        }
        const Vec dx = lu.solve(-fx);
        if (!dx.allFinite()) {
            return false;
        }
        bool improved = false;
        for (double lambda = 1.0; lambda >= 1.0 / 64.0; lambda *= 0.5) {
            trial = x + lambda * dx;
            f(trial, ftrial);
            const double tn = inf_norm(ftrial);
            if (ftrial.allFinite() && tn < norm) {
                x = trial;
                fx = ftrial;
                norm = tn;
                improved = true;
                break;
            }
        }
        if (!improved) {
            return norm <= opts.rhs_tol;
        }
    }
    return norm <= opts.rhs_tol;
}

} // namespace

Mat numerical_jacobian(const RhsFunction &f, const Vec &x, const Vec &scale) {
    const Eigen::Index n = x.size();
    Mat jac(n, n);
    Vec xp = x;
    Vec fp(n), fm(n);
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = root_eps * std::max(std::abs(x(i)), scale(i));
        xp(i) = x(i) + h;
        f(xp, fp);
        xp(i) = x(i) - h;
        f(xp, fm);
        xp(i) = x(i);
        jac.col(i) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

RelaxationResult relax_to_steady(const RhsFunction &f, const Vec &x0, const Vec &scale,
                                 const RelaxationOptions &opts) {
    const Eigen::Index n = x0.size();
    const double g = 1.0 + 1.0 / std::sqrt(2.0);

    RelaxationResult res;
    Vec x = x0;
    Vec fx(n);
    f(x, fx);
    double h = opts.h0;
    double t = 0.0;
    double switch_level = opts.newton_switch;
    double best = inf_norm(fx);

    Vec k1(n), k2(n), stage(n), fstage(n), xnew(n), err(n);
    Mat jac;
    Factorization w;
    bool jac_fresh = false;
    double factored_h = -1.0;
    int since_jac = 0;
    bool just_rejected = false;

    while (true) {
        double norm = inf_norm(fx);
        best = std::min(best, norm);
        if (norm <= opts.rhs_tol) {
            break;
        }
        if (norm <= switch_level) {
            Vec xs = x;
            Vec fs = fx;
            if (newton_polish(f, scale, opts, xs, fs, res.newton_iterations)) {
                x = xs;
                fx = fs;
                break;
            }
            // Newton stalled; keep integrating and only retry much closer in.
            switch_level *= 1e-2;
        }
        if (t >= opts.t_max || res.steps + res.rejected >= opts.max_steps) {
            throw SolverError("no steady state within t=" + std::to_string(t) + " after " +
                                  std::to_string(res.steps) + " steps; ||f||=" +
                                  std::to_string(norm),
                              best);
        }

        if (!jac_fresh || since_jac >= opts.jacobian_every) {
            jac = numerical_jacobian(f, x, scale);
            jac_fresh = true;
            since_jac = 0;
            factored_h = -1.0;
        }
        if (h != factored_h) {
            if (!w.compute(jac, g * h, false)) {
                h *= 0.25;
                continue;
            }
            factored_h = h;
        }

        k1 = w.solve(fx);
        stage = x + h * k1;
        f(stage, fstage);
        k2 = w.solve(fstage - 2.0 * k1);
        xnew = x + h * (1.5 * k1 + 0.5 * k2);
        err = 0.5 * h * (k1 + k2);

        double enorm = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double tol_i = opts.atol * scale(i) + opts.rtol * std::abs(xnew(i));
            enorm = std::max(enorm, std::abs(err(i)) / tol_i);
        }
        if (!xnew.allFinite() || !std::isfinite(enorm)) {
            enorm = 1e10;
        }

        const double factor = std::clamp(0.9 / std::sqrt(std::max(enorm, 1e-10)), 0.2,
                                         just_rejected ? 1.0 : 4.0);
        just_rejected = enorm > 1.0;
        if (enorm <= 1.0) {
            x = xnew;
            f(x, fx);
            t += h;
            ++res.steps;
            ++since_jac;
            // Keep the factorisation when the step would barely change.
            if (factor > 1.2 || factor < 1.0) {
                h *= factor;
            }
        } else {
            ++res.rejected;
            h *= std::min(factor, 0.5);
            jac_fresh = false;
        }
        h = std::min(h, std::max(opts.t_max - t, 1e-300));
    }

    res.x = x;
    res.t = t;
    res.rhs_norm = inf_norm(fx);
    return res;
}

} // namespace bcl
