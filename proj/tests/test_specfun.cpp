#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "fracrep/specfun.hpp"

using namespace fracrep;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("recip_gamma at reference points", "[specfun]") {
    CHECK(recip_gamma(1.0) == 1.0);
    CHECK(recip_gamma(-3.0) == 0.0);
    CHECK(recip_gamma(0.0) == 0.0);
    CHECK_THAT(recip_gamma(0.5), WithinRel(1.0 / std::sqrt(std::numbers::pi), 1e-14));
    // Within the snap tolerance of a pole the result is exactly zero.
    CHECK(recip_gamma(-2.0 + 1e-11) == 0.0);
}

TEST_CASE("recip_gamma agrees with std::tgamma", "[specfun]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-12.0, 30.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double x = d(rng);
        if (is_gamma_pole(x)) {
            continue;
        }
        CHECK_THAT(recip_gamma(x), WithinRel(1.0 / std::tgamma(x), 1e-12));
    }
    // Large arguments go through the log route without overflow.
    CHECK_THAT(recip_gamma(200.5), WithinRel(std::exp(-std::lgamma(200.5)), 1e-12));
}

TEST_CASE("recip_gamma(x) * gen_factorial(x - 1) == 1 off the poles", "[specfun]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-9.5, 40.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double x = d(rng);
        if (is_gamma_pole(x)) {
            continue;
        }
        CHECK_THAT(recip_gamma(x) * gen_factorial(x - 1.0), WithinRel(1.0, 1e-12));
    }
}

TEST_CASE("gen_factorial values and poles", "[specfun]") {
    CHECK_THAT(gen_factorial(4.0), WithinRel(24.0, 1e-14));
    CHECK(gen_factorial(0.0) == 1.0);
    CHECK_THAT(gen_factorial(-0.5), WithinRel(std::sqrt(std::numbers::pi), 1e-14));
    for (double pole : {-1.0, -2.0, -7.0}) {
        try {
            (void)gen_factorial(pole);
            FAIL("expected PoleValue");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::PoleValue);
        }
    }
}

TEST_CASE("gen_binomial falling-product form", "[specfun]") {
    CHECK(gen_binomial(-1.0, 3) == -1.0);
    CHECK_THAT(gen_binomial(-0.5, 2), WithinRel(0.375, 1e-15));
    CHECK(gen_binomial(2.5, 0) == 1.0);
    // Integer alpha reproduces the ordinary binomial, including the zero tail.
    CHECK(gen_binomial(5.0, 2) == 10.0);
    CHECK(gen_binomial(3.0, 5) == 0.0);
    // Against the gamma definition at a generic argument.
    const double alpha = 1.37;
    const int n = 4;
    const double expected = std::tgamma(alpha + 1) / (std::tgamma(n + 1.0) * std::tgamma(alpha - n + 1));
    CHECK_THAT(gen_binomial(alpha, n), WithinRel(expected, 1e-13));
}

TEST_CASE("gamma_ratio_shift as a finite product", "[specfun]") {
    CHECK(gamma_ratio_shift(5.0, 2) == 12.0);
    CHECK(gamma_ratio_shift(0.37, 0) == 1.0);
    CHECK_THAT(gamma_ratio_shift(0.5, 3), WithinRel(-1.875, 1e-15));
    // Finite where both gammas are poles: Gamma(-2)/Gamma(-4) = (-3)(-4).
    CHECK(gamma_ratio_shift(-2.0, 2) == 12.0);
}

TEST_CASE("gamma_ratio_shift matches the gamma quotient where finite", "[specfun]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-8.0, 12.0);
    std::uniform_int_distribution<int> m(0, 6);
    for (int trial = 0; trial < 300; ++trial) {
        const double x = d(rng);
        const int shift = m(rng);
        if (is_gamma_pole(x) || is_gamma_pole(x - shift)) {
            continue;
        }
        CHECK_THAT(gamma_ratio_shift(x, shift),
                   WithinRel(gen_factorial(x - 1.0) * recip_gamma(x - shift), 1e-10));
    }
}

TEST_CASE("gauss_sum reference examples", "[specfun]") {
    CHECK_THAT(gauss_sum(1, 1, 0), WithinRel(2.0, 1e-13));
    CHECK_THAT(gauss_sum(0, 5, 2), WithinRel(1.0 / (120.0 * 2.0), 1e-13));
    // Brute-force three-term sum over n = 0..2.
    double direct = 0.0;
    for (int n = 0; n <= 2; ++n) {
        direct += 1.0 / (std::tgamma(2.0 - n + 1) * std::tgamma(3.0 - n + 1) * std::tgamma(0.5 + n + 1) *
                         std::tgamma(n + 1.0));
    }
    CHECK_THAT(gauss_sum(2, 3, 0.5), WithinRel(direct, 1e-12));
}

TEST_CASE("gauss_sum terminating case for random free parameters", "[specfun]") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> pick_a(0, 6);
    std::uniform_real_distribution<double> d(-4.0, 4.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int a = pick_a(rng);
        const double b = d(rng);
        const double c = d(rng);
        double sum = 0.0;
        double scale = 0.0;
        for (int n = 0; n <= a; ++n) {
            const double t =
                recip_gamma(a - n + 1.0) * recip_gamma(b - n + 1.0) * recip_gamma(c + n + 1.0) / std::tgamma(n + 1.0);
            sum += t;
            scale += std::abs(t);
        }
        const double closed = gauss_sum(a, b, c);
        CHECK(std::abs(closed - sum) <= 1e-9 * std::max(std::abs(sum), scale));
    }
}

TEST_CASE("gauss_sum rejects divergent parameters", "[specfun]") {
    try {
        (void)gauss_sum(-0.5, -0.7, -0.2);
        FAIL("expected DivergentSeries");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DivergentSeries);
    }
}

TEST_CASE("mittag_leffler special cases", "[specfun]") {
    CHECK_THAT(mittag_leffler(1.0, 1.0, 1.0), WithinRel(std::exp(1.0), 1e-13));
    CHECK_THAT(mittag_leffler(1.0, 2.0, 1.0), WithinRel(std::exp(1.0) - 1.0, 1e-13));
    for (double z = -5.0; z <= 5.0; z += 0.25) {
        CHECK_THAT(mittag_leffler(1.0, 1.0, z), WithinAbs(std::exp(z), 1e-10));
    }
    CHECK(mittag_leffler(0.7, 1.3, 0.0) == Catch::Approx(1.0 / std::tgamma(1.3)).epsilon(1e-14));
}

TEST_CASE("mittag_leffler order one half against exp(x^2) erfc(x)", "[specfun]") {
    // E_{1/2}(-x) = exp(x^2) erfc(x): an oracle independent of the series.
    for (double x : {0.1, 0.5, 1.0, 1.7, 2.5}) {
        CHECK_THAT(mittag_leffler(0.5, 1.0, -x), WithinRel(std::exp(x * x) * std::erfc(x), 1e-11));
    }
    CHECK_THAT(mittag_leffler(0.5, 1.0, -1.0), WithinAbs(0.4275835761558070, 1e-12));
}

TEST_CASE("mittag_leffler against a plain 200-term compensated sum", "[specfun]") {
    double sum = 0.0;
    double comp = 0.0;
    double zk = 1.0;
    for (int k = 0; k < 200; ++k) {
        const double term = zk / std::tgamma(0.5 * k + 0.5);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        zk *= -1.0;
        if (0.5 * (k + 1) + 0.5 > 170.0) {
            break;
        }
    }
    CHECK_THAT(mittag_leffler(0.5, 0.5, -1.0), WithinRel(sum, 1e-12));
}

TEST_CASE("mittag_leffler validates parameters and the iteration cap", "[specfun]") {
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(mittag_leffler(1.0, -1.0, 1.0), Error);
    try {
        (void)mittag_leffler(0.05, 1.0, -500.0);
        FAIL("expected NonConvergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonConvergence);
    }
}

TEST_CASE("CompensatedSum recovers cancelled low-order bits", "[specfun]") {
    CompensatedSum s;
    s.add(1.0);
    s.add(1e-16);
    s.add(1e-16);
    s.add(-1.0);
    CHECK_THAT(s.value(), WithinRel(2e-16, 1e-12));
}
