#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fracrep/neumann.hpp"
#include "fracrep/series.hpp"

using namespace fracrep;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

GridFunction ones(const Grid& g) {
    return sample([](double) { return 1.0; }, g);
}

// Bracket of S_k by explicit enumeration with direct coefficients, for one node.
double enumerated_bracket(const AnalyticCoefficient& a, double beta, int k, int n, double t) {
    double sum = 0.0;
    for (const auto& c : enumerate_compositions(n, k)) {
        double product = sk_coefficient(beta, c);
        for (int part : c.parts) {
            product *= a.deriv(part, t);
        }
        sum += product;
    }
    return sum;
}

}  // namespace

TEST_CASE("sk_term for k = 0 is I^beta b", "[series]") {
    const Grid g(1.0, 257);
    const auto b = sample([](double t) { return std::exp(-t); }, g);
    const auto a = AnalyticCoefficient::sine(1.0, 1.0).on(1.0);
    CHECK(max_abs_difference(sk_term(a, b, 0.6, 0, 0), rl_integral(b, 0.6)) == 0.0);
    CHECK(sk_term(a, b, 0.6, 0, 3).max_norm() == 0.0);
}

TEST_CASE("sk_term for k = 1 with a = t", "[series]") {
    // S_1 = a I^{2 beta} b - beta I^{2 beta + 1} b; higher n vanish since a'' = 0.
    const Grid g(1.0, 513);
    const auto b = ones(g);
    const auto a = AnalyticCoefficient::polynomial({0.0, 1.0}).on(1.0);
    const double beta = 0.5;
    GridFunction s1 = sk_term(a, b, beta, 1, 0) + sk_term(a, b, beta, 1, 1);
    const auto I2 = rl_integral(b, 2 * beta);
    const auto I3 = rl_integral(b, 2 * beta + 1);
    for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK_THAT(s1[j], WithinAbs(g.node(j) * I2[j] - beta * I3[j], 1e-14));
    }
    CHECK(sk_term(a, b, beta, 1, 2).max_norm() == 0.0);
}

TEST_CASE("sk_term for constant a keeps only n = 0", "[series]") {
    const Grid g(1.0, 257);
    const auto b = sample([](double t) { return 1.0 + t * t; }, g);
    const auto a = AnalyticCoefficient::constant(0.8).on(1.0);
    for (int k = 1; k <= 3; ++k) {
        const auto t0 = sk_term(a, b, 0.7, k, 0);
        const auto expected = rl_integral(b, (k + 1) * 0.7) * std::pow(0.8, k);
        CHECK(max_abs_difference(t0, expected) <= 1e-14);
        for (int n = 1; n <= 3; ++n) {
            CHECK(sk_term(a, b, 0.7, k, n).max_norm() == 0.0);
        }
    }
}

TEST_CASE("sum over n of sk_term equals the nested term", "[series]") {
    const Grid g(1.0, 1025);
    const auto b = ones(g);
    const auto a = AnalyticCoefficient::exponential(1.0, 0.5).on(1.0);
    const double beta = 0.7;
    GridFunction nested = rl_integral(b, beta);
    for (int k = 1; k <= 3; ++k) {
        nested = nested_term(nested, a, beta);
        GridFunction sum(g);
        for (int n = 0; n <= 16; ++n) {
            sum += sk_term(a, b, beta, k, n);
        }
        CHECK(max_abs_difference(sum, nested) <= 2e-5);
    }
}

TEST_CASE("bracket recursion agrees with composition enumeration", "[series]") {
    const Grid g(1.0, 17);
    const std::vector<AnalyticCoefficient> coeffs{AnalyticCoefficient::sine(1.3, 0.9, 0.2).on(1.0),
                                                  AnalyticCoefficient::exponential(-0.7, 2.0).on(1.0)};
    for (double beta : {0.35, 1.0, 1.7}) {
        for (const auto& a : coeffs) {
            const auto table = detail::scaled_derivative_table(a, g, 8);
            const detail::BracketEvaluator eval(beta, table);
            for (int k = 1; k <= 4; ++k) {
                const auto layer = eval.layer(k, 8);
                for (int n = 0; n <= 8; ++n) {
                    for (std::size_t j = 0; j < g.size(); j += 4) {
                        const double expected = enumerated_bracket(a, beta, k, n, g.node(j));
                        CHECK_THAT(layer[static_cast<std::size_t>(n)][j],
                                   WithinAbs(expected, 1e-10 * std::max(1.0, std::abs(expected))));
                    }
                }
            }
        }
    }
}

TEST_CASE("series_solve with a = 0 returns I^beta b", "[series]") {
    const Grid g(1.0, 257);
    const auto b = sample([](double t) { return std::cos(t); }, g);
    const auto r = series_solve(AnalyticCoefficient::constant(0.0).on(1.0), b, 0.8, {}, SolveOptions{false});
    CHECK(r.converged);
    CHECK(r.k_used == 0);
    CHECK(max_abs_difference(r.solution, rl_integral(b, 0.8)) == 0.0);
}

TEST_CASE("series_solve classical ODE y' + y = 1", "[series]") {
    const Grid g(1.0, 2049);
    SeriesTruncation trunc;
    trunc.k_max = 20;
    const auto one = AnalyticCoefficient::constant(1.0).on(1.0);
    for (bool fast : {true, false}) {
        const auto r = series_solve(one, ones(g), 1.0, trunc, SolveOptions{fast});
        CHECK(r.converged);
        CHECK(r.path == (fast ? SolvePath::MittagLeffler : SolvePath::Series));
        for (std::size_t j = 0; j < g.size(); ++j) {
            CHECK(std::abs(r.solution[j] - (1.0 - std::exp(-g.node(j)))) <= 1e-6);
        }
    }
}

TEST_CASE("series_solve matches the Neumann series for a = t", "[series]") {
    const Grid g(1.0, 2049);
    const auto a = AnalyticCoefficient::polynomial({0.0, 1.0}).on(1.0);
    const auto r = series_solve(a, ones(g), 0.5, {});
    const auto n = neumann_solve(a, ones(g), 0.5, 60, 1e-14);
    CHECK(r.converged);
    CHECK_FALSE(r.n_cap_hit);
    CHECK(max_abs_difference(r.solution, n.solution) <= 2e-5);
    // Polynomial degree 1 caps layer k at n = k.
    for (std::size_t k = 0; k < r.n_used.size(); ++k) {
        CHECK(r.n_used[k] <= static_cast<int>(k));
    }
    // Residual no worse than five times the oracle's.
    const FracOrder order(0.5);
    CHECK(residual(r.solution, a, ones(g), order) <= 5.0 * residual(n.solution, a, ones(g), order));
}

TEST_CASE("series_solve reports truncation flags", "[series]") {
    const Grid g(1.0, 257);
    const auto a = AnalyticCoefficient::sine(1.0, 1.0).on(1.0);
    SeriesTruncation zero;
    zero.k_max = 0;
    const auto r0 = series_solve(a, ones(g), 0.5, zero);
    CHECK(r0.k_cap_hit);
    CHECK_FALSE(r0.converged);
    CHECK(r0.k_used == 0);

    SeriesTruncation tight;
    tight.n_max = 1;
    const auto r1 = series_solve(AnalyticCoefficient::exponential(2.0).on(1.0), ones(g), 0.5, tight);
    CHECK(r1.n_cap_hit);
    CHECK_FALSE(r1.converged);
    CHECK(std::isfinite(r1.solution.max_norm()));

    SeriesTruncation bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(series_solve(a, ones(g), 0.5, bad), Error);
    CHECK_THROWS_AS(series_solve(a, ones(g), 0.0, {}), Error);
}

TEST_CASE("series_solve diagnostics are consistent", "[series]") {
    const Grid g(1.0, 257);
    const auto a = AnalyticCoefficient::sine(1.0, 1.0).on(1.0);
    const auto b = sample([](double t) { return t; }, g);
    const auto r = series_solve(a, b, 1.2, {});
    REQUIRE(r.partial_sums.size() == static_cast<std::size_t>(r.k_used) + 1);
    REQUIRE(r.layer_norms.size() == r.partial_sums.size());
    CHECK(max_abs_difference(r.partial_sums.back(), r.solution) == 0.0);
    CHECK(r.n_used.size() == r.partial_sums.size());
    CHECK_FALSE(r.term_norms.empty());
    CHECK(r.timings.total >= 0.0);
}

TEST_CASE("constant_coeff_solve reference values", "[series]") {
    const Grid g(1.0, 2049);
    const auto b = ones(g);
    CHECK(max_abs_difference(constant_coeff_solve(0.0, b, 0.6), rl_integral(b, 0.6)) == 0.0);
    const auto y1 = constant_coeff_solve(1.0, b, 1.0);
    for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(std::abs(y1[j] - (1.0 - std::exp(-g.node(j)))) <= 1e-8);
    }
    const auto yh = constant_coeff_solve(1.0, b, 0.5);
    CHECK_THAT(yh[g.size() - 1], WithinAbs(0.5724164238, 1e-8));
    for (std::size_t j = 0; j < g.size(); j += 8) {
        const double t = g.node(j);
        CHECK(std::abs(yh[j] - (1.0 - std::exp(t) * std::erfc(std::sqrt(t)))) <= 1e-7);
    }
}

TEST_CASE("partial sums alternate around the limit for positive data", "[series]") {
    const Grid g(1.0, 513);
    const auto one = AnalyticCoefficient::constant(1.0).on(1.0);
    const auto r = series_solve(one, ones(g), 0.8, {}, SolveOptions{false});
    const double limit = r.solution[g.size() - 1];
    for (std::size_t k = 0; k + 1 < r.partial_sums.size(); ++k) {
        const double v = r.partial_sums[k][g.size() - 1];
        if (std::abs(v - limit) < 1e-12) {
            continue;
        }
        CHECK(((k % 2 == 0) ? v > limit : v < limit));
    }
}
