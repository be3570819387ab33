#include <doctest.h>

#include <cmath>

#include "bcl/ed_driver.hpp"
#include "bcl/observables.hpp"
#include "support.hpp"

using namespace bcl;

TEST_CASE("singlet") {
    for (int n : {2, 10, 100}) {
        const auto o = compute_observables(testing::delta_state(n, 0, 0));
        CHECK(o.xi2 == doctest::Approx(0.0));
        CHECK(o.sf == doctest::Approx(-0.5));
        CHECK(o.jpjm == 0.0);
        CHECK(o.jz_mean == 0.0);
        CHECK_FALSE(o.g2.has_value());
        CHECK(o.g2_denominator == 0.0);
    }
}

TEST_CASE("fully excited symmetric state") {
    for (int n : {2, 9, 100}) {
        const auto o = compute_observables(testing::delta_state(n, n, n));
        CHECK(o.jpjm == doctest::Approx(n));
        CHECK(o.sf == doctest::Approx(0.0));
        REQUIRE(o.g2.has_value());
        CHECK(*o.g2 == doctest::Approx(2.0 * (n - 1) / n));
        CHECK(o.sigz_mean == doctest::Approx(1.0));
    }
}

TEST_CASE("ground state") {
    for (int n : {1, 4, 51}) {
        const auto o = compute_observables(testing::delta_state(n, n, -n));
        CHECK(o.jpjm == 0.0);
        CHECK(o.jz_mean == doctest::Approx(-0.5 * n));
        CHECK(o.jz_var == doctest::Approx(0.0));
        CHECK(o.sigz_mean == doctest::Approx(-1.0));
        CHECK(o.xi2 == doctest::Approx(1.0));
    }
}

TEST_CASE("ladder matrix elements of a single state") {
    // |J=3, M=1> of N=10: J+J- = (J+M)(J-M+1) = 12, J+J+J-J- = 12 * (J+M-1)(J-M+2) = 12 * 12.
    const auto o = compute_observables(testing::delta_state(10, 6, 2));
    CHECK(o.jpjm == doctest::Approx(12.0));
    REQUIRE(o.jp2jm2.has_value());
    CHECK(*o.jp2jm2 == doctest::Approx(144.0));
    CHECK(o.j2_mean == doctest::Approx(12.0));
    CHECK(o.xi2 == doctest::Approx((12.0 - 1.0) / 5.0));
}

TEST_CASE("field invariants on solver output") {
    for (double w : {0.03, 0.1, 0.2, 0.6}) {
        const int n = 200;
        const auto o = ed_steady(ModelParams::from_cooperativity(n, 10.0, w)).obs;
        CHECK(o.jpjm >= 0.0);
        CHECK(o.jz_var >= 0.0);
        CHECK(o.sf >= -0.5);
        CHECK(o.xi2 >= 0.0);
        REQUIRE(o.jp2jm2.has_value());
        CHECK(*o.jp2jm2 >= 0.0);
        CHECK(o.sigz_mean == doctest::Approx(2.0 * o.jz_mean / n));
        CHECK(o.spm_corr == doctest::Approx(o.sf / (n - 1)));
        // Both forms of the subradiance factor: per-pair correlation and
        // collective emission minus the independent-atom part, per atom.
        const double sf_collective = (o.jpjm - 0.5 * n * (1.0 + o.sigz_mean)) / n;
        CHECK(o.sf == doctest::Approx(sf_collective).epsilon(1e-10));
        CHECK(o.g2_numerator == doctest::Approx(*o.jp2jm2));
        CHECK(o.g2_denominator == doctest::Approx(o.jpjm * o.jpjm));
    }
}
