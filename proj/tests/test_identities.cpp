#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fracrep/identities.hpp"

using namespace fracrep;
using Catch::Matchers::WithinRel;

TEST_CASE("direct Gauss sum terminates for integer a", "[identities]") {
    const auto d = gauss_direct_sum(1, 1, 0);
    CHECK(d.terms == 2);
    CHECK_THAT(d.value, WithinRel(2.0, 1e-15));
    CHECK(d.tail_estimate == 0.0);
}

TEST_CASE("terminating Gauss sums match the closed form", "[identities]") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> pick_a(0, 6);
    std::uniform_real_distribution<double> free(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = check_gauss_terminating(pick_a(rng), free(rng), free(rng), 1e-9);
        CHECK(c.passed);
    }
}

TEST_CASE("non-terminating Gauss sums converge to the closed form", "[identities]") {
    const auto d = gauss_direct_sum(1.5, 2.25, 0.5);
    CHECK(d.tail_estimate <= 1e-12 * std::abs(d.value));
    CHECK_THAT(d.value, WithinRel(gauss_sum(1.5, 2.25, 0.5), 1e-10));
    CHECK(check_gauss_tail(0.7, 3.1, 1.4, 1e-6).passed);
    CHECK_THROWS_AS(gauss_direct_sum(-0.9, -0.8, -0.5), Error);
}

TEST_CASE("composition identity for every small j-tuple", "[identities]") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const double beta = draw_identity_beta(rng, 4);
        for (int k = 2; k <= 3; ++k) {
            for (const auto& j : bounded_tuples(k, 4)) {
                const auto c = check_composition(beta, j, 1e-9);
                INFO(c.parameters);
                CHECK(c.passed);
            }
        }
    }
}

TEST_CASE("composition identity k = 2 base case by hand", "[identities]") {
    // sum_i (-b)!/(-b-i)! / ((-b-j1-j2+i)! i! (j2-i)!) = (-2b-j1)! / ((-b-j1)! (-2b-j1-j2)! j2!)
    const double b = 0.37;
    const int j1 = 1;
    const int j2 = 2;
    double lhs = 0.0;
    for (int i = 0; i <= j2; ++i) {
        lhs += std::tgamma(1 - b) / std::tgamma(1 - b - i) /
               (std::tgamma(1 - b - j1 - j2 + i) * std::tgamma(i + 1.0) * std::tgamma(j2 - i + 1.0));
    }
    const double rhs = std::tgamma(1 - 2 * b - j1) /
                       (std::tgamma(1 - b - j1) * std::tgamma(1 - 2 * b - j1 - j2) * std::tgamma(j2 + 1.0));
    CHECK_THAT(lhs, WithinRel(rhs, 1e-12));
    CHECK_THAT(composition_identity_lhs(b, {j1, j2}), WithinRel(lhs, 1e-12));
    CHECK_THAT(composition_identity_rhs(b, {j1, j2}), WithinRel(rhs, 1e-12));
}

TEST_CASE("bounded tuples enumerate every tuple once", "[identities]") {
    CHECK(bounded_tuples(2, 4).size() == 15);  // C(6, 2)
    CHECK(bounded_tuples(3, 4).size() == 35);  // C(7, 3)
    CHECK(bounded_tuples(2, 0).size() == 1);
}

TEST_CASE("randomized trials are seeded and complete", "[identities]") {
    const auto a = run_identity_trials(5, 10);
    const auto b = run_identity_trials(5, 10);
    REQUIRE(a.size() == 30);
    for (std::size_t q = 0; q < a.size(); ++q) {
        CHECK(a[q].parameters == b[q].parameters);
        CHECK(a[q].passed);
    }
    IdentityTrialOptions forced;
    forced.forced_a = 4;
    const auto f = run_identity_trials(1, 1, forced);
    REQUIRE(f.size() == 1);
    CHECK(f[0].kind == "gauss-terminating");
    CHECK(f[0].parameters.rfind("a,b,c = (4,", 0) == 0);
    CHECK_THROWS_AS(run_identity_trials(1, 0), Error);
}
