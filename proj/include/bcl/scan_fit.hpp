#pragma once

// Parameter sweeps over the repump rate, minimum searches and power-law fits.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bcl/cumulant.hpp"
#include "bcl/ed_driver.hpp"
#include "bcl/errors.hpp"
#include "bcl/inhomogeneous.hpp"

namespace bcl {

enum class Method { Ed, Cumulant2, Cumulant3, MeanField, Analytic, Inhom };

const char *to_string(Method m);
/// Accepts the names produced by to_string(). Throws ConfigError otherwise.
Method parse_method(const std::string &name);

struct MethodSettings {
    Method method = Method::Ed;
    TruncationPolicy truncation;
    SteadyOptions steady;
    RelaxationOptions relaxation;
    RelaxationOptions inhom_relaxation = inhom_relaxation_options();
    /// Required for Method::Inhom; counts must sum to the atom number.
    std::optional<InhomConfig> inhom;
    /// When set, every point uses 1/T2 = alpha * w instead of p.t2_inv.
    std::optional<double> alpha;
};

struct PointResult {
    double w = 0.0;
    double t2_inv = 0.0;
    ObservablesRecord obs;
    /// Filled by Method::Inhom only; obs then carries jz_mean, sf, sigz_mean
    /// and jpjm = power / gamma_c, with NaN elsewhere.
    std::optional<InhomObservables> inhom;
};

/// One steady state at p (with p.w as given).
PointResult evaluate(const ModelParams &p, const MethodSettings &s);

/// A point of a sweep failed; carries the repump rate.
class PointFailure : public SolverError {
  public:
    PointFailure(double w, const std::string &what)
        : SolverError("w=" + std::to_string(w) + ": " + what, 0.0), w_(w) {}
    double w() const noexcept { return w_; }

  private:
    double w_;
};

struct SweepOptions {
    int threads = 1;
    /// Record failures and continue instead of throwing PointFailure.
    bool keep_going = false;
};

struct SweepFailure {
    double w;
    std::string message;
};

struct SweepResult {
    Method method = Method::Ed;
    ModelParams params;
    std::vector<double> grid;
    /// Parallel to grid; empty where the point failed (keep_going only).
    std::vector<std::optional<PointResult>> points;
    std::vector<SweepFailure> failures;
};

/// `points` values from start to stop inclusive; a single point when
/// points == 1 (then start must equal stop).
std::vector<double> linear_grid(double start, double stop, int points);

/// Evaluates every grid point (strictly increasing w). Results do not depend
/// on the thread count. With a fixed ED truncation the basis is built once.
SweepResult sweep_w(const ModelParams &p, const std::vector<double> &grid,
                    const MethodSettings &s, const SweepOptions &opts = {});

/// No interior minimum inside the search bracket.
class BracketError : public DomainError {
  public:
    using DomainError::DomainError;
};

struct MinimumResult {
    double w_star = 0.0;
    double value = 0.0;
    int evaluations = 0;
    /// The infimum sits at a discontinuity of the objective (the analytic
    /// regime boundary) rather than at an interior stationary point.
    bool boundary = false;
};

struct MinimizeOptions {
    int coarse_points = 9;
    double rel_tol = 1e-4; // on w
};

/// Coarse grid, then golden-section refinement around the best grid point.
/// Throws BracketError if the best grid point is an end of the bracket.
MinimumResult minimize_scalar(const std::function<double(double)> &f, double lo, double hi,
                              const MinimizeOptions &opts = {});

using ObservableSelector = std::function<double(const PointResult &)>;

/// Minimum of an observable over w in [lo, hi].
MinimumResult find_min(const ModelParams &p, const MethodSettings &s,
                       const ObservableSelector &select, double lo, double hi,
                       const MinimizeOptions &opts = {});

/// Minimum squeezing parameter; the bracket defaults to [0.8, 1.2] gamma.
/// For the analytic method the minimum is the w -> gamma+ limit (xi2 = 0),
/// reported with boundary = true.
MinimumResult find_min_xi2(const ModelParams &p, const MethodSettings &s,
                           std::optional<std::pair<double, double>> bracket = std::nullopt,
                           const MinimizeOptions &opts = {});

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double residual = 0.0; // RMS in log-log
    int points_used = 0;
};

/// Unweighted least squares of log(value) against log(n). Needs at least
/// three points, all positive; throws DomainError otherwise.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>> &points);

} // namespace bcl
