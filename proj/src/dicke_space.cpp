#include "bcl/dicke_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bcl/errors.hpp"

namespace bcl {

namespace {

void require_valid(int n_atoms, int two_j) {
    if (n_atoms < 1 || two_j < 0 || two_j > n_atoms || (n_atoms - two_j) % 2 != 0) {
        throw DomainError("invalid spin 2J=" + std::to_string(two_j) + " for N=" +
                          std::to_string(n_atoms));
    }
}

// Binomial coefficient in 128-bit integers; exact for n <= 120.
unsigned __int128 binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    }
    return c;
}

constexpr int kExactLimit = 120;

} // namespace

bool is_valid(int n_atoms, DickeIndex s) {
    return n_atoms >= 1 && s.two_j >= 0 && s.two_j <= n_atoms && (n_atoms - s.two_j) % 2 == 0 &&
           std::abs(s.two_m) <= s.two_j && (s.two_j - s.two_m) % 2 == 0;
}

double log_degeneracy(int n_atoms, int two_j) {
    require_valid(n_atoms, two_j);
    const long double n = n_atoms;
    const long double j = 0.5L * two_j;
    return static_cast<double>(std::lgamma(n + 1.0L) + std::log(2.0L * j + 1.0L) -
                               std::lgamma(0.5L * n + j + 2.0L) -
                               std::lgamma(0.5L * n - j + 1.0L));
}

double degeneracy(int n_atoms, int two_j) {
    require_valid(n_atoms, two_j);
    if (n_atoms <= kExactLimit) {
        // d = C(N, N/2 - J) - C(N, N/2 - J - 1)
        const int k = (n_atoms - two_j) / 2;
        return static_cast<double>(binomial(n_atoms, k) - binomial(n_atoms, k - 1));
    }
    const double d = std::exp(log_degeneracy(n_atoms, two_j));
    return d < 1e12 ? std::round(d) : d;
}

bool StateSpace::is_complete() const {
    return two_j_max_ == n_atoms_ && (!depth_max_ || *depth_max_ >= n_atoms_);
}

int StateSpace::rungs(int two_j) const {
    if (two_j < two_j_min() || two_j > two_j_max_ || (two_j - two_j_min()) % 2 != 0) {
        return 0;
    }
    const int full = two_j + 1;
    return depth_max_ ? std::min(full, *depth_max_ + 1) : full;
}

bool StateSpace::contains(DickeIndex s) const {
    if (!is_valid(n_atoms_, s) || s.two_j > two_j_max_) {
        return false;
    }
    return !depth_max_ || s.depth() <= *depth_max_;
}

std::size_t StateSpace::index(DickeIndex s) const {
    if (!contains(s)) {
        throw DomainError("state (2J=" + std::to_string(s.two_j) + ", 2M=" +
                          std::to_string(s.two_m) + ") is not in the space");
    }
    const auto ladder = static_cast<std::size_t>((s.two_j - two_j_min()) / 2);
    return offsets_[ladder] + static_cast<std::size_t>(s.depth());
}

DickeIndex StateSpace::state(std::size_t k) const {
    if (k >= size_) {
        throw DomainError("ordinal " + std::to_string(k) + " out of range");
    }
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), k);
    const auto ladder = static_cast<int>(std::distance(offsets_.begin(), it)) - 1;
    const int two_j = two_j_min() + 2 * ladder;
    const auto depth = static_cast<int>(k - offsets_[static_cast<std::size_t>(ladder)]);
    return {two_j, -two_j + 2 * depth};
}

StateSpace build_space(int n_atoms, std::optional<int> two_j_max, std::optional<int> depth_max) {
    if (n_atoms < 1) {
        throw DomainError("n_atoms must be >= 1");
    }
    StateSpace space;
    space.n_atoms_ = n_atoms;
    int jmax = two_j_max.value_or(n_atoms);
    if (jmax < space.two_j_min()) {
        throw DomainError("2J_max below the smallest spin of the system");
    }
    jmax = std::min(jmax, n_atoms);
    // Snap to the parity of the ladder family.
    if ((jmax - space.two_j_min()) % 2 != 0) {
        --jmax;
    }
    space.two_j_max_ = jmax;
    if (depth_max) {
        if (*depth_max < 0) {
            throw DomainError("depth_max must be non-negative");
        }
        space.depth_max_ = depth_max;
    }
    std::size_t total = 0;
    for (int two_j = space.two_j_min(); two_j <= jmax; two_j += 2) {
        space.offsets_.push_back(total);
        total += static_cast<std::size_t>(space.rungs(two_j));
    }
    space.offsets_.push_back(total);
    space.size_ = total;
    return space;
}

} // namespace bcl
