#pragma once

// Steady states of small autonomous ODE systems by "integrate, then polish":
// a linearly implicit adaptive integrator follows the physical trajectory
// until the right-hand side is small, then damped Newton finishes the job.

#include <Eigen/Dense>
#include <functional>

namespace bcl {

using RhsFunction = std::function<void(const Eigen::VectorXd &x, Eigen::VectorXd &dxdt)>;

struct RelaxationOptions {
    double rhs_tol = 1e-12;       // final ||f||_inf
    double newton_switch = 1e-7;  // attempt Newton once ||f||_inf drops below
    double t_max = 1e5;           // in units of 1/gamma_c
    double rtol = 1e-6;
    double atol = 1e-8;           // multiplied by the per-component scale
    double h0 = 1e-6;
    int jacobian_every = 1;       // accepted steps between Jacobian refreshes
    int max_steps = 200000;
    int max_newton = 40;
};

struct RelaxationResult {
    Eigen::VectorXd x;
    double t = 0.0;
    int steps = 0;
    int rejected = 0;
    int newton_iterations = 0;
    double rhs_norm = 0.0;
};

/// Central-difference Jacobian; the step of component i is
/// sqrt(eps) * max(|x_i|, scale_i).
Eigen::MatrixXd numerical_jacobian(const RhsFunction &f, const Eigen::VectorXd &x,
                                   const Eigen::VectorXd &scale);

/// Integrates dx/dt = f(x) from x0 with the two-stage Rosenbrock scheme of
/// Verwer et al. (order 2, L-stable, valid for any Jacobian approximation)
/// and polishes with damped Newton. `scale` gives the typical magnitude of
/// each component. Throws SolverError if t_max or max_steps is exhausted.
RelaxationResult relax_to_steady(const RhsFunction &f, const Eigen::VectorXd &x0,
                                 const Eigen::VectorXd &scale, const RelaxationOptions &opts = {});

} // namespace bcl
