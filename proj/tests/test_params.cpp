#include <doctest.h>

#include <random>

#include "bcl/errors.hpp"
#include "bcl/params.hpp"

using namespace bcl;

TEST_CASE("derived gammas") {
    ModelParams p;
    p.gamma = 0.1;
    p.gamma_c = 1.0;

    p.w = 0.0;
    auto g = derived_gammas(p);
    CHECK(g.gamma_plus == doctest::Approx(1.1));
    CHECK(g.gamma_minus == doctest::Approx(-1.1));

    p.w = 0.1;
    g = derived_gammas(p);
    CHECK(g.gamma_plus == doctest::Approx(1.2));
    CHECK(g.gamma_minus == doctest::Approx(-1.0));

    p.w = p.gamma + p.gamma_c;
    CHECK(derived_gammas(p).gamma_minus == 0.0);
}

TEST_CASE("derived gammas sum and difference") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 100; ++i) {
        ModelParams p;
        p.w = u(rng);
        p.gamma = u(rng);
        p.gamma_c = u(rng);
        const auto g = derived_gammas(p);
        CHECK(g.gamma_plus + g.gamma_minus == doctest::Approx(2.0 * p.w).epsilon(1e-15));
        CHECK(g.gamma_plus - g.gamma_minus ==
              doctest::Approx(2.0 * (p.gamma + p.gamma_c)).epsilon(1e-15));
    }
}

TEST_CASE("cooperativity and validation") {
    const ModelParams p = ModelParams::from_cooperativity(100, 10.0, 0.1);
    CHECK(p.gamma_c == 1.0);
    CHECK(p.gamma == doctest::Approx(0.1));
    CHECK(p.cooperativity() == p.gamma_c / p.gamma);

    ModelParams bad = p;
    bad.w = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = p;
    bad.n_atoms = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = p;
    bad.t2_inv = -0.1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("effective pump rates") {
    SUBCASE("unit scheme") {
        const auto e = effective_pump_rates({1.0, 1.0, 1.0, 1.0});
        CHECK(e.w == doctest::Approx(0.5));
        CHECK(e.t2_inv == doctest::Approx(0.125));
        CHECK(e.alpha == doctest::Approx(0.25));
    }
    SUBCASE("alpha from the branching ratio") {
        CHECK(effective_pump_rates({2.0, 0.3, 1.2, 5.0}).alpha == doctest::Approx(1.0));
        CHECK(effective_pump_rates({2.0, 1.0, 0.4, 5.0}).alpha == doctest::Approx(0.1));
    }
    SUBCASE("alpha ignores the drive and the broadening") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(0.1, 10.0);
        const PumpLevelScheme base{1.3, 0.7, 0.9, 2.1};
        const double alpha = effective_pump_rates(base).alpha;
        for (int i = 0; i < 50; ++i) {
            PumpLevelScheme s = base;
            s.omega_p *= u(rng);
            s.big_gamma *= u(rng);
            CHECK(effective_pump_rates(s).alpha == doctest::Approx(alpha).epsilon(1e-14));
        }
    }
    SUBCASE("invalid schemes") {
        CHECK_THROWS_AS(effective_pump_rates({0.0, 1.0, 1.0, 1.0}), DomainError);
        CHECK_THROWS_AS(effective_pump_rates({1.0, 1.0, 1.0, 0.0}), DomainError);
        CHECK_THROWS_AS(effective_pump_rates({1.0, 0.0, 1.0, 1.0}), DomainError);
    }
}
