#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bcl/dicke_space.hpp"
#include "bcl/errors.hpp"

using namespace bcl;

namespace {

// Multiplicities by adding one spin-1/2 at a time: d[N+1][2J] = d[N][2J-1] + d[N][2J+1].
std::vector<std::vector<double>> coupled_multiplicities(int n_max) {
    std::vector<std::vector<double>> d(n_max + 1, std::vector<double>(n_max + 2, 0.0));
    d[0][0] = 1.0;
    for (int n = 0; n < n_max; ++n) {
        for (int tj = 0; tj <= n; ++tj) {
            if (d[n][tj] == 0.0) {
                continue;
            }
            d[n + 1][tj + 1] += d[n][tj];
            if (tj > 0) {
                d[n + 1][tj - 1] += d[n][tj];
            }
        }
    }
    return d;
}

} // namespace

TEST_CASE("degeneracy of four atoms") {
    CHECK(degeneracy(4, 4) == 1.0);
    CHECK(degeneracy(4, 2) == 3.0);
    CHECK(degeneracy(4, 0) == 2.0);
}

TEST_CASE("degeneracy matches spin addition") {
    const auto d = coupled_multiplicities(60);
    for (int n = 1; n <= 60; ++n) {
        for (int tj = n % 2; tj <= n; tj += 2) {
            CHECK(degeneracy(n, tj) == d[n][tj]);
        }
    }
}

TEST_CASE("dimension sum rule") {
    for (int n = 1; n <= 20; ++n) {
        double total = 0.0;
        for (int tj = n % 2; tj <= n; tj += 2) {
            total += degeneracy(n, tj) * (tj + 1);
        }
        CHECK(total == std::ldexp(1.0, n));
    }
}

TEST_CASE("fully symmetric ladder is unique") {
    for (int n = 2; n <= 1000; n += 2) {
        CHECK(degeneracy(n, n) == 1.0);
    }
}

TEST_CASE("large-N degeneracy stays finite in log form") {
    const double ld = log_degeneracy(100000, 1000);
    CHECK(std::isfinite(ld));
    CHECK(ld > 0.0);
    // log d(N, 0) for N = 4 is log 2.
    CHECK(log_degeneracy(4, 0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("degeneracy rejects invalid labels") {
    CHECK_THROWS_AS(degeneracy(4, 1), DomainError);
    CHECK_THROWS_AS(degeneracy(4, 6), DomainError);
    CHECK_THROWS_AS(degeneracy(3, 0), DomainError);
    CHECK_THROWS_AS(degeneracy(4, -2), DomainError);
}

TEST_CASE("space sizes") {
    CHECK(build_space(4).size() == 9);
    CHECK(build_space(2).size() == 4);
    CHECK(build_space(100, 20).size() == 121);
    for (int n = 2; n <= 10000; n += n < 100 ? 2 : 998) {
        const auto s = build_space(n);
        CHECK(s.size() == static_cast<std::size_t>((n + 2) * (n + 2) / 4));
        CHECK(s.is_complete());
    }
    CHECK(build_space(3).size() == 6);
}

TEST_CASE("depth truncation keeps the lowest rungs") {
    const auto s = build_space(10, std::nullopt, 2);
    CHECK_FALSE(s.is_complete());
    CHECK(s.rungs(0) == 1);
    CHECK(s.rungs(2) == 3);
    CHECK(s.rungs(10) == 3);
    CHECK(s.contains({10, -6}));
    CHECK_FALSE(s.contains({10, -4}));
}

TEST_CASE("ordering is J then M ascending") {
    const auto s = build_space(4);
    CHECK(s.state(0) == DickeIndex{0, 0});
    CHECK(s.state(1) == DickeIndex{2, -2});
    CHECK(s.state(s.size() - 1) == DickeIndex{4, 4});
    CHECK(s.index({0, 0}) == 0);
    CHECK(s.index({4, 4}) == s.size() - 1);

    const auto t = build_space(100, 20);
    CHECK(t.index({20, 20}) == t.size() - 1);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const DickeIndex a = t.state(k - 1);
        const DickeIndex b = t.state(k);
        CHECK((a.two_j < b.two_j || (a.two_j == b.two_j && a.two_m < b.two_m)));
    }
}

TEST_CASE("index round trip") {
    std::mt19937 rng(3);
    for (int n : {7, 50, 301}) {
        const auto s = build_space(n, n - 4);
        std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
        for (int i = 0; i < 200; ++i) {
            const std::size_t k = pick(rng);
            CHECK(s.index(s.state(k)) == k);
            const DickeIndex d = s.state(k);
            CHECK(s.state(s.index(d)) == d);
        }
    }
}

TEST_CASE("out-of-range labels") {
    const auto s = build_space(10, 6);
    CHECK_THROWS_AS(s.index({8, 0}), DomainError);
    CHECK_THROWS_AS(s.index({6, 8}), DomainError);
    CHECK_THROWS_AS(s.index({5, 1}), DomainError);
    CHECK_THROWS_AS(s.state(s.size()), DomainError);
}
