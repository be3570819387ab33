#include "bcl/rates.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace bcl {

namespace {

// The tabulated dephasing rates are normalised to a jump operator
// sigma^z / (2 sqrt(T2)). The model uses sigma^z / sqrt(T2), which is four
// times faster.
constexpr double kDephasingScale = 4.0;

template <typename Emit>
void for_each_transition(const ModelParams &p, DickeIndex s, Emit &&emit) {
    const double n = p.n_atoms;
    const double j = s.j();
    const double m = s.m();
    const int tj = s.two_j;
    const int tm = s.two_m;

    const auto push = [&](int to_tj, int to_tm, double rate, Channel c) {
        if (rate > 0.0) {
            emit(Transition{s, DickeIndex{to_tj, to_tm}, rate, c});
        }
    };

    // Same-J and J-1 branches carry 1/J denominators; they all vanish at J = 0.
    const bool has_lower = tj > 0;
    const bool has_upper = tj < p.n_atoms;

    if (p.gamma_c > 0.0) {
        push(tj, tm - 2, p.gamma_c * (j + m) * (j - m + 1.0), Channel::CollectiveDecay);
    }

    if (p.w > 0.0) {
        if (has_lower) {
            push(tj, tm + 2, p.w * (n + 2.0) * (j - m) * (j + m + 1.0) / (4.0 * j * (j + 1.0)),
                 Channel::Repump);
            push(tj - 2, tm + 2,
                 p.w * (n + 2.0 * j + 2.0) * (j - m) * (j - m - 1.0) / (4.0 * j * (2.0 * j + 1.0)),
                 Channel::Repump);
        }
        if (has_upper) {
            push(tj + 2, tm + 2,
                 p.w * (n - 2.0 * j) * (j + m + 1.0) * (j + m + 2.0) /
                     (4.0 * (j + 1.0) * (2.0 * j + 1.0)),
                 Channel::Repump);
        }
    }

    if (p.gamma > 0.0) {
        if (has_lower) {
            push(tj, tm - 2,
                 p.gamma * (n + 2.0) * (j + m) * (j - m + 1.0) / (4.0 * j * (j + 1.0)),
                 Channel::IndividualDecay);
            push(tj - 2, tm - 2,
                 p.gamma * (n + 2.0 * j + 2.0) * (j + m) * (j + m - 1.0) /
                     (4.0 * j * (2.0 * j + 1.0)),
                 Channel::IndividualDecay);
        }
        if (has_upper) {
            push(tj + 2, tm - 2,
                 p.gamma * (n - 2.0 * j) * (j - m + 1.0) * (j - m + 2.0) /
                     (4.0 * (j + 1.0) * (2.0 * j + 1.0)),
                 Channel::IndividualDecay);
        }
    }

    if (p.t2_inv > 0.0) {
        const double r = kDephasingScale * p.t2_inv;
        if (has_lower) {
            push(tj - 2, tm,
                 r * (n + 2.0 * j + 2.0) * (j - m) * (j + m) / (4.0 * j * (2.0 * j + 1.0)),
                 Channel::Dephasing);
        }
        if (has_upper) {
            push(tj + 2, tm,
                 r * (n - 2.0 * j) * (j - m + 1.0) * (j + m + 1.0) /
                     (4.0 * (j + 1.0) * (2.0 * j + 1.0)),
                 Channel::Dephasing);
        }
    }
}

} // namespace

const char *to_string(Channel c) {
    switch (c) {
    case Channel::CollectiveDecay:
        return "collective_decay";
    case Channel::Repump:
        return "repump";
    case Channel::IndividualDecay:
        return "individual_decay";
    case Channel::Dephasing:
        return "dephasing";
    }
    return "unknown";
}

std::vector<Transition> channel_rates(const ModelParams &p, DickeIndex s) {
    std::vector<Transition> out;
    out.reserve(9);
    for_each_transition(p, s, [&](const Transition &t) { out.push_back(t); });
    return out;
}

RateMatrix::RateMatrix(std::shared_ptr<const StateSpace> space, Sparse matrix,
                       std::vector<double> leak_ladder, std::vector<double> leak_depth)
    : space_(std::move(space)), matrix_(std::move(matrix)), leak_ladder_(std::move(leak_ladder)),
      leak_depth_(std::move(leak_depth)) {}

double RateMatrix::max_outflow() const {
    double m = 0.0;
    for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
        m = std::max(m, std::abs(matrix_.coeff(k, k)));
    }
    return m;
}

void RateMatrix::write_coordinates(std::ostream &os) const {
    char buf[96];
    for (Eigen::Index col = 0; col < matrix_.outerSize(); ++col) {
        for (Sparse::InnerIterator it(matrix_, col); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()),
                          static_cast<long>(col), it.value());
            os << buf;
        }
    }
}

RateMatrix build_rate_matrix(const ModelParams &p, std::shared_ptr<const StateSpace> space) {
    p.validate();
    const std::size_t n = space->size();
    std::vector<Eigen::Triplet<double, long>> triplets;
    triplets.reserve(n * 9);
    std::vector<double> leak_ladder(n, 0.0);
    std::vector<double> leak_depth(n, 0.0);

    for (std::size_t k = 0; k < n; ++k) {
        const DickeIndex s = space->state(k);
        double outflow = 0.0;
        for_each_transition(p, s, [&](const Transition &t) {
            if (space->contains(t.to)) {
                triplets.emplace_back(static_cast<long>(space->index(t.to)), static_cast<long>(k),
                                      t.rate);
                outflow += t.rate;
            } else if (t.to.two_j > space->two_j_max()) {
                leak_ladder[k] += t.rate;
            } else {
                leak_depth[k] += t.rate;
            }
        });
        triplets.emplace_back(static_cast<long>(k), static_cast<long>(k), -outflow);
    }

    RateMatrix::Sparse m(static_cast<long>(n), static_cast<long>(n));
    // Duplicate (row, col) pairs are summed: collective and individual decay
    // share the (J, M-1) target.
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return RateMatrix(std::move(space), std::move(m), std::move(leak_ladder),
                      std::move(leak_depth));
}

} // namespace bcl
