#pragma once

#include <Eigen/SparseCore>
#include <iosfwd>
#include <memory>
#include <vector>

#include "bcl/dicke_space.hpp"
#include "bcl/params.hpp"

namespace bcl {

enum class Channel { CollectiveDecay, Repump, IndividualDecay, Dephasing };

const char *to_string(Channel c);

struct Transition {
    DickeIndex from;
    DickeIndex to;
    double rate;
    Channel channel;
};

/// Every population-changing jump out of `s`, one entry per table branch.
/// Branches whose rate vanishes (including the 0/0 forms at J = 0) are
/// omitted, as is the dephasing self-transition (J, M) -> (J, M).
std::vector<Transition> channel_rates(const ModelParams &p, DickeIndex s);

/// Sparse generator of the (J, M) population dynamics, dP/dt = R P.
///
/// Off-diagonal R(j, k) is the flow k -> j. Transitions that leave the
/// retained space are dropped, and the diagonal holds minus the retained
/// outflow so every column sums to zero. The dropped outflow is kept per
/// state as leakage, split by which truncation removed the target.
class RateMatrix {
  public:
    using Sparse = Eigen::SparseMatrix<double, Eigen::ColMajor, long>;

    RateMatrix(std::shared_ptr<const StateSpace> space, Sparse matrix,
               std::vector<double> leak_ladder, std::vector<double> leak_depth);

    const StateSpace &space() const { return *space_; }
    const std::shared_ptr<const StateSpace> &space_ptr() const { return space_; }
    const Sparse &matrix() const { return matrix_; }

    /// Total dropped outflow rate of ordinal k.
    double leakage(std::size_t k) const { return leak_ladder_[k] + leak_depth_[k]; }
    const std::vector<double> &leakage_ladder() const { return leak_ladder_; }
    const std::vector<double> &leakage_depth() const { return leak_depth_; }

    /// Largest |R(k, k)|; sets the natural residual scale.
    double max_outflow() const;

    /// Coordinate dump "row col value", 17 significant digits, sorted by
    /// (col, row). Off-diagonal and diagonal entries alike.
    void write_coordinates(std::ostream &os) const;

  private:
    std::shared_ptr<const StateSpace> space_;
    Sparse matrix_;
    std::vector<double> leak_ladder_;
    std::vector<double> leak_depth_;
};

RateMatrix build_rate_matrix(const ModelParams &p, std::shared_ptr<const StateSpace> space);

inline RateMatrix build_rate_matrix(const ModelParams &p, const StateSpace &space) {
    return build_rate_matrix(p, std::make_shared<const StateSpace>(space));
}

} // namespace bcl
