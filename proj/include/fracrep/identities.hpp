#pragma once

// Independent checks of the two finite/hypergeometric identities behind the
// series representation: the Gauss-type summation and the finite
// composition identity that the S_k induction reduces to.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fracrep/errors.hpp"
#include "fracrep/specfun.hpp"

namespace fracrep {

struct DirectSum {
    double value = 0.0;
    double abs_sum = 0.0;        // sum of |terms|, the natural scale for relative error
    double tail_estimate = 0.0;  // bound on the neglected tail (0 for terminating sums)
    int terms = 0;
};

/// Direct summation of sum_n 1/((a-n)! (b-n)! (c+n)! n!).
///
/// Terminates by itself when a or b is a non-negative integer. Otherwise terms
/// follow the ratio (a-n)(b-n)/((c+n+1)(n+1)) and decay like n^{-(a+b+c+2)};
/// summation stops once the estimated tail falls below tail_tol relative to the
/// running sum, or at max_terms.
[[nodiscard]] inline DirectSum gauss_direct_sum(double a, double b, double c, int max_terms = 1'000'000,
                                                double tail_tol = 1e-12) {
    DirectSum out;
    CompensatedSum sum;
    CompensatedSum abs_sum;
    if (is_nonnegative_integer(a) || is_nonnegative_integer(b)) {
        const int top = static_cast<int>(std::round(
            is_nonnegative_integer(a) && is_nonnegative_integer(b) ? std::min(a, b)
            : is_nonnegative_integer(a)                            ? a
                                                                   : b));
        for (int n = 0; n <= top; ++n) {
            const double t = recip_gamma(a - n + 1.0) * recip_gamma(b - n + 1.0) *
                             recip_gamma(c + n + 1.0) * recip_gamma(n + 1.0);
            sum.add(t);
            abs_sum.add(std::abs(t));
        }
        out.value = sum.value();
        out.abs_sum = abs_sum.value();
        out.terms = top + 1;
        return out;
    }
    const double decay = a + b + c + 2.0;  // |t_n| ~ n^{-decay}
    if (!(decay > 1.0)) {
        throw Error(ErrorCode::DivergentSeries, "direct Gauss sum needs a+b+c > -1");
    }
    // Start at the first n where (c+n)! is finite.
    int n = 0;
    while (is_gamma_pole(c + n + 1.0)) {
        ++n;
    }
    double t = recip_gamma(a - n + 1.0) * recip_gamma(b - n + 1.0) * recip_gamma(c + n + 1.0) *
               recip_gamma(n + 1.0);
    for (; n < max_terms; ++n) {
        sum.add(t);
        abs_sum.add(std::abs(t));
        ++out.terms;
        const double nn = n + 1.0;
        const bool asymptotic = nn > 2.0 * (std::abs(a) + std::abs(b) + std::abs(c)) + 10.0;
        if (asymptotic) {
            // Tail sum_{m>n} m^{-decay} scaled to |t_n|.
            out.tail_estimate = std::abs(t) * nn / (decay - 1.0);
            if (out.tail_estimate <= tail_tol * std::abs(sum.value())) {
                break;
            }
        }
        t *= (a - n) * (b - n) / ((c + n + 1.0) * (n + 1.0));
    }
    out.value = sum.value();
    out.abs_sum = abs_sum.value();
    return out;
}

/// Left side of the finite composition identity for j = (j_1, ..., j_k):
///
///   sum over 0 <= i_l <= j_{l+1} of
///     (-b)! prod_{l=2}^{k-1} (-l b - I_{l-1})!  /  prod_{l=1}^{k-1} (-l b - I_l)!
///     / ((-b - J_k + I_{k-1})! prod i_l! prod (j_{l+1} - i_l)!)
///
/// with I_l = i_1 + ... + i_l and J_k = j_1 + ... + j_k. Every factorial is
/// evaluated directly through the gamma machinery.
[[nodiscard]] inline double composition_identity_lhs(double beta, const std::vector<int>& j) {
    const int k = static_cast<int>(j.size());
    if (k < 2) {
        throw Error(ErrorCode::InvalidArgument, "composition identity needs k >= 2");
    }
    int jk = 0;
    for (int v : j) {
        if (v < 0) {
            throw Error(ErrorCode::InvalidArgument, "j entries must be non-negative");
        }
        jk += v;
    }
    std::vector<int> i(static_cast<std::size_t>(k - 1), 0);
    CompensatedSum sum;
    while (true) {
        double term = gen_factorial(-beta);
        int partial = 0;
        for (int l = 1; l <= k - 1; ++l) {
            if (l >= 2) {
                term *= gen_factorial(-l * beta - partial);  // (-l b - I_{l-1})!
            }
            partial += i[static_cast<std::size_t>(l - 1)];
            term *= recip_gamma(-l * beta - partial + 1.0);  // 1/(-l b - I_l)!
        }
        term *= recip_gamma(-beta - jk + partial + 1.0);
        for (int l = 0; l < k - 1; ++l) {
            const int il = i[static_cast<std::size_t>(l)];
            term *= recip_gamma(il + 1.0) * recip_gamma(j[static_cast<std::size_t>(l + 1)] - il + 1.0);
        }
        sum.add(term);
        // Odometer over i_l in [0, j_{l+1}].
        int pos = 0;
        while (pos < k - 1) {
            auto& slot = i[static_cast<std::size_t>(pos)];
            if (slot < j[static_cast<std::size_t>(pos + 1)]) {
                ++slot;
                break;
            }
            slot = 0;
            ++pos;
        }
        if (pos == k - 1) {
            break;
        }
    }
    return sum.value();
}

/// Right side: prod_{l=2}^{k} (-l b - J_{l-1})! / (prod_{l=1}^{k} (-l b - J_l)! prod_{l=2}^{k} j_l!).
[[nodiscard]] inline double composition_identity_rhs(double beta, const std::vector<int>& j) {
    const int k = static_cast<int>(j.size());
    if (k < 2) {
        throw Error(ErrorCode::InvalidArgument, "composition identity needs k >= 2");
    }
    double value = 1.0;
    int partial = 0;
    for (int l = 1; l <= k; ++l) {
        if (l >= 2) {
            value *= gen_factorial(-l * beta - partial);
            value *= recip_gamma(j[static_cast<std::size_t>(l - 1)] + 1.0);
        }
        partial += j[static_cast<std::size_t>(l - 1)];
        value *= recip_gamma(-l * beta - partial + 1.0);
    }
    return value;
}

/// True when l*beta is within the pole tolerance of an integer for some l <= l_max,
/// which would put the identity's individual factorials on poles.
[[nodiscard]] inline bool beta_hits_pole(double beta, int l_max) {
    for (int l = 1; l <= l_max; ++l) {
        const double x = l * beta;
        if (std::abs(x - std::round(x)) < 1e-6) {
            return true;
        }
    }
    return false;
}

/// Every j-tuple of length k with entries summing to at most total.
[[nodiscard]] inline std::vector<std::vector<int>> bounded_tuples(int k, int total) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(k), 0);
    while (true) {
        out.push_back(cur);
        int pos = 0;
        while (pos < k) {
            auto& slot = cur[static_cast<std::size_t>(pos)];
            ++slot;
            int s = 0;
            for (int v : cur) s += v;
            if (s <= total) break;
            slot = 0;
            ++pos;
        }
        if (pos == k) break;
    }
    return out;
}

[[nodiscard]] inline double relative_error(double got, double expected, double scale) {
    const double denom = std::max({std::abs(expected), std::abs(scale), 1e-300});
    return std::abs(got - expected) / denom;
}

/// One randomized identity check, reported with its parameter tuple.
struct IdentityCheck {
    std::string kind;  // "gauss-terminating", "gauss-tail" or "composition"
    std::string parameters;
    double lhs = 0.0;
    double rhs = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct IdentityTrialOptions {
    double integer_tolerance = 1e-9;  // terminating Gauss sums
    double tail_tolerance = 1e-6;     // non-terminating Gauss sums
    double composition_tolerance = 1e-9;
    std::optional<int> forced_a;      // forces the terminating case with this integer a
};

inline std::string format_tuple(const std::vector<double>& values) {
    std::string s = "(";
    for (std::size_t q = 0; q < values.size(); ++q) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", values[q]);
        s += (q ? ", " : "") + std::string(buf);
    }
    return s + ")";
}

/// Terminating Gauss sum: a a non-negative integer, b and c free reals.
[[nodiscard]] inline IdentityCheck check_gauss_terminating(int a, double b, double c, double tol) {
    const DirectSum direct = gauss_direct_sum(a, b, c);
    const double closed = gauss_sum(a, b, c);
    IdentityCheck r{"gauss-terminating", "a,b,c = " + format_tuple({double(a), b, c}), closed,
                    direct.value, relative_error(closed, direct.value, direct.abs_sum), tol, false};
    r.passed = r.rel_error <= tol;
    return r;
}

/// Non-terminating Gauss sum against truncated summation with a tail bound.
[[nodiscard]] inline IdentityCheck check_gauss_tail(double a, double b, double c, double tol) {
    const DirectSum direct = gauss_direct_sum(a, b, c);
    const double closed = gauss_sum(a, b, c);
    IdentityCheck r{"gauss-tail", "a,b,c = " + format_tuple({a, b, c}), closed, direct.value,
                    relative_error(closed, direct.value, 0.0), tol, false};
    const double tail_rel = direct.tail_estimate / std::max(std::abs(direct.value), 1e-300);
    r.passed = r.rel_error <= tol && tail_rel <= tol;
    return r;
}

[[nodiscard]] inline IdentityCheck check_composition(double beta, const std::vector<int>& j, double tol) {
    const double lhs = composition_identity_lhs(beta, j);
    const double rhs = composition_identity_rhs(beta, j);
    std::vector<double> params{beta};
    for (int v : j) params.push_back(v);
    IdentityCheck r{"composition", "beta,j = " + format_tuple(params), lhs, rhs,
                    relative_error(lhs, rhs, 0.0), tol, false};
    r.passed = r.rel_error <= tol;
    return r;
}

/// Draws a beta in (0.2, 2.5) with l*beta away from integers for l <= l_max.
template <typename Rng>
[[nodiscard]] double draw_identity_beta(Rng& rng, int l_max) {
    std::uniform_real_distribution<double> d(0.2, 2.5);
    double beta = d(rng);
    while (beta_hits_pole(beta, l_max)) {
        beta = d(rng);
    }
    return beta;
}

/// Seeded randomized suite: each trial runs one terminating Gauss check, one
/// non-terminating Gauss check and one composition identity check.
[[nodiscard]] inline std::vector<IdentityCheck> run_identity_trials(std::uint64_t seed, int trials,
                                                                    const IdentityTrialOptions& opt = {}) {
    if (trials < 1) {
        throw Error(ErrorCode::InvalidArgument, "identity trials must be at least 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_a(0, 6);
    std::uniform_real_distribution<double> free(-3.0, 3.0);
    std::uniform_real_distribution<double> positive(0.1, 3.9);
    std::uniform_real_distribution<double> shift(-0.9, 2.0);
    std::uniform_int_distribution<int> pick_k(2, 3);
    std::vector<IdentityCheck> out;
    for (int trial = 0; trial < trials; ++trial) {
        const int a = opt.forced_a ? *opt.forced_a : pick_a(rng);
        out.push_back(check_gauss_terminating(a, free(rng), free(rng), opt.integer_tolerance));
        if (opt.forced_a) {
            continue;
        }
        double x = positive(rng), y = positive(rng), z = shift(rng);
        while (x + y + z < 2.0 || is_nonnegative_integer(x) || is_nonnegative_integer(y)) {
            x = positive(rng);
            y = positive(rng);
            z = shift(rng);
        }
        out.push_back(check_gauss_tail(x, y, z, opt.tail_tolerance));
        const int k = pick_k(rng);
        const double beta = draw_identity_beta(rng, k + 1);
        const auto tuples = bounded_tuples(k, 4);
        std::uniform_int_distribution<std::size_t> pick_t(0, tuples.size() - 1);
        out.push_back(check_composition(beta, tuples[pick_t(rng)], opt.composition_tolerance));
    }
    return out;
}

}  // namespace fracrep
