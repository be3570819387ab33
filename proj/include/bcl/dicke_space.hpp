#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace bcl {

/// Collective state label |J, M> in doubled units so half-integer ladders
/// (odd atom numbers) stay integral.
struct DickeIndex {
    int two_j = 0;
    int two_m = 0;

    double j() const { return 0.5 * two_j; }
    double m() const { return 0.5 * two_m; }
    /// Number of rungs above the bottom of the ladder, J + M.
    int depth() const { return (two_j + two_m) / 2; }

    friend bool operator==(const DickeIndex &, const DickeIndex &) = default;
};

/// True when (two_j, two_m) is a legal label for n_atoms spins.
bool is_valid(int n_atoms, DickeIndex s);

/// Number of orthogonal multiplets with total spin J among n_atoms spin-1/2
/// particles. Exact for n_atoms <= 120, otherwise evaluated through
/// log-factorials (and rounded to an integer when below 1e12).
double degeneracy(int n_atoms, int two_j);

/// Natural log of degeneracy(); finite for any valid input.
double log_degeneracy(int n_atoms, int two_j);

/// Retained (J, M) basis, ordered by ascending J then ascending M.
///
/// Two optional truncations are supported. `two_j_max` removes whole ladders
/// with 2J above the bound. `depth_max` keeps only the lowest depth_max + 1
/// rungs (J + M <= depth_max) of every ladder, which is where the population
/// sits when the repump is weaker than the free-space decay.
class StateSpace {
  public:
    StateSpace() = default;

    int n_atoms() const { return n_atoms_; }
    int two_j_min() const { return n_atoms_ % 2; }
    int two_j_max() const { return two_j_max_; }
    std::optional<int> depth_max() const { return depth_max_; }
    std::size_t size() const { return size_; }

    /// No ladder or rung has been removed.
    bool is_complete() const;

    bool contains(DickeIndex s) const;

    /// Ordinal of a retained state. Throws DomainError otherwise.
    std::size_t index(DickeIndex s) const;

    /// Inverse of index(). Throws DomainError for k >= size().
    DickeIndex state(std::size_t k) const;

    /// Rungs kept on the ladder with the given 2J (0 if the ladder is absent).
    int rungs(int two_j) const;

    friend StateSpace build_space(int n_atoms, std::optional<int> two_j_max,
                                  std::optional<int> depth_max);

  private:
    int n_atoms_ = 0;
    int two_j_max_ = 0;
    std::optional<int> depth_max_;
    std::size_t size_ = 0;
    // offsets_[l] is the ordinal of (two_j_min + 2l, -J); one extra sentinel.
    std::vector<std::size_t> offsets_;
};

/// Enumerates the basis. two_j_max defaults to n_atoms and is clamped to it;
/// depth_max defaults to no depth truncation.
StateSpace build_space(int n_atoms, std::optional<int> two_j_max = std::nullopt,
                       std::optional<int> depth_max = std::nullopt);

} // namespace bcl
