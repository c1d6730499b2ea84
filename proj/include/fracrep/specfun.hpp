#pragma once

// Special-function kernel: pole-safe gamma machinery, generalized binomials,
// the Gauss-type summation closed form and the two-parameter Mittag-Leffler
// function. Everything here is pure and 64-bit.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracrep/errors.hpp"

namespace fracrep {

/// Inputs closer than this to a non-positive integer are treated as poles of
/// the gamma function (so the reciprocal is exactly zero).
inline constexpr double kPoleSnapTolerance = 1e-9;

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

namespace detail {

inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Gamma(x) for x >= 0.5 by the Lanczos approximation (g = 7, 9 terms).
inline double lanczos_gamma(double x) {
    x -= 1.0;
    double acc = kLanczosCoeffs[0];
    for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i) {
        acc += kLanczosCoeffs[i] / (x + static_cast<double>(i));
    }
    const double t = x + kLanczosG + 0.5;
    // t^(x+1/2) is split in two halves so the power cannot overflow before Gamma does.
    const double half_pow = std::pow(t, 0.5 * (x + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * acc * (half_pow * std::exp(-t)) * half_pow;
}

// Gamma(n) for integer 1 <= n <= 171 as a running product; exact through 23!.
inline double integer_gamma(int n) {
    double result = 1.0;
    for (int j = 2; j < n; ++j) {
        result *= j;
    }
    return result;
}

[[nodiscard]] inline bool is_small_positive_integer(double x) noexcept {
    return x >= 1.0 && x <= 171.0 && x == std::floor(x);
}

// sin(pi x) with the argument reduced to [-1/2, 1/2] first.
inline double sin_pi(double x) {
    const double n = std::round(x);
    const double s = std::sin(std::numbers::pi * (x - n));
    return std::fmod(std::abs(n), 2.0) == 1.0 ? -s : s;
}

}  // namespace detail

/// True when x lies within kPoleSnapTolerance of {0, -1, -2, ...}.
[[nodiscard]] inline bool is_gamma_pole(double x) noexcept {
    const double n = std::round(x);
    return n <= 0.0 && std::abs(x - n) <= kPoleSnapTolerance;
}

/// True when x lies within kPoleSnapTolerance of {0, 1, 2, ...}.
[[nodiscard]] inline bool is_nonnegative_integer(double x) noexcept {
    const double n = std::round(x);
    return n >= 0.0 && std::abs(x - n) <= kPoleSnapTolerance;
}

/// 1/Gamma(x). Entire: exact zero at the poles of Gamma, finite elsewhere.
[[nodiscard]] inline double recip_gamma(double x) {
    if (is_gamma_pole(x)) {
        return 0.0;
    }
    if (x >= 0.5) {
        if (x > 171.0) {
            return std::exp(-std::lgamma(x));
        }
        if (detail::is_small_positive_integer(x)) {
            return 1.0 / detail::integer_gamma(static_cast<int>(x));
        }
        return 1.0 / detail::lanczos_gamma(x);
    }
    // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi.
    return detail::sin_pi(x) * detail::lanczos_gamma(1.0 - x) / std::numbers::pi;
}

/// Gamma(x + 1), the generalized factorial x!.
[[nodiscard]] inline double gen_factorial(double x) {
    const double z = x + 1.0;
    if (is_gamma_pole(z)) {
        throw Error(ErrorCode::PoleValue,
                    "factorial of negative integer " + std::to_string(x) + " is a pole");
    }
    if (detail::is_small_positive_integer(z)) {
        return detail::integer_gamma(static_cast<int>(z));
    }
    if (z >= 0.5) {
        return detail::lanczos_gamma(z);
    }
    return std::numbers::pi / (detail::sin_pi(z) * detail::lanczos_gamma(1.0 - z));
}

/// Generalized binomial coefficient (alpha choose n) in falling-product form.
[[nodiscard]] inline double gen_binomial(double alpha, int n) {
    if (n < 0) {
        throw Error(ErrorCode::InvalidArgument, "binomial lower index must be non-negative");
    }
    double result = 1.0;
    for (int j = 0; j < n; ++j) {
        result *= (alpha - j) / static_cast<double>(j + 1);
    }
    return result;
}

/// Gamma(x)/Gamma(x - m) = (x-1)(x-2)...(x-m), valid for every real x.
[[nodiscard]] inline double gamma_ratio_shift(double x, int m) {
    if (m < 0) {
        throw Error(ErrorCode::InvalidArgument, "gamma_ratio_shift needs m >= 0");
    }
    double result = 1.0;
    for (int j = 1; j <= m; ++j) {
        result *= x - j;
    }
    return result;
}

/// Closed form of sum_n 1/((a-n)! (b-n)! (c+n)! n!), namely
/// (a+b+c)! / (a! b! (a+c)! (b+c)!).
///
/// Valid when a+b+c > -1, or when a or b is a non-negative integer (the series
/// is then finite and the identity holds by analytic continuation).
[[nodiscard]] inline double gauss_sum(double a, double b, double c) {
    const bool a_int = is_nonnegative_integer(a);
    const bool b_int = is_nonnegative_integer(b);
    if (!(a + b + c > -1.0) && !a_int && !b_int) {
        throw Error(ErrorCode::DivergentSeries,
                    "gauss_sum needs a+b+c > -1 or a non-negative integer a or b");
    }
    const double denominator = recip_gamma(a + 1.0) * recip_gamma(b + 1.0) *
                               recip_gamma(a + c + 1.0) * recip_gamma(b + c + 1.0);
    if (!is_gamma_pole(a + b + c + 1.0)) {
        return gen_factorial(a + b + c) * denominator;
    }
    // (a+b+c)! is a pole, so the closed form is an inf * 0 limit. Only reachable
    // in the terminating case; sum the finite series instead.
    const double top = std::round(a_int ? a : b);
    CompensatedSum sum;
    for (int n = 0; n <= static_cast<int>(top); ++n) {
        sum.add(recip_gamma(a - n + 1.0) * recip_gamma(b - n + 1.0) *
                recip_gamma(c + n + 1.0) * recip_gamma(n + 1.0));
    }
    return sum.value();
}

struct MLParams {
    double alpha = 1.0;
    double beta_param = 1.0;
    double z = 0.0;
};

/// Outcome of the Mittag-Leffler Taylor summation. max_term bounds the
/// cancellation: the absolute rounding error is about eps * max_term.
struct MittagLefflerSum {
    double value = 0.0;
    double max_term = 0.0;
    int terms = 0;
};

inline constexpr int kMittagLefflerTermCap = 10'000;

/// Taylor summation of E_{alpha,beta}(z) = sum_k z^k / Gamma(alpha k + beta).
/// No asymptotic branch: for large negative z the result is dominated by
/// cancellation, which the caller can detect from max_term.
[[nodiscard]] inline MittagLefflerSum mittag_leffler_sum(const MLParams& p) {
    if (!(p.alpha > 0.0) || !(p.beta_param > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "Mittag-Leffler parameters must be positive");
    }
    CompensatedSum sum;
    MittagLefflerSum out;
    double z_power = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kMittagLefflerTermCap; ++k) {
        const double term = z_power * recip_gamma(p.alpha * k + p.beta_param);
        sum.add(term);
        const double magnitude = std::abs(term);
        out.max_term = std::max(out.max_term, magnitude);
        out.terms = k + 1;
        const double current = std::abs(sum.value());
        const bool decreasing = magnitude <= previous;
        if (decreasing && (magnitude <= 1e-17 * current || magnitude < 1e-300) && k > 0) {
            out.value = sum.value();
            return out;
        }
        if (z_power == 0.0 && k > 0) {
            out.value = sum.value();
            return out;
        }
        previous = magnitude;
        z_power *= p.z;
        if (!std::isfinite(z_power)) {
            break;
        }
    }
    throw Error(ErrorCode::NonConvergence,
                "Mittag-Leffler series did not settle within the term cap (z = " +
                    std::to_string(p.z) + ")");
}

[[nodiscard]] inline double mittag_leffler(const MLParams& p) {
    return mittag_leffler_sum(p).value;
}

[[nodiscard]] inline double mittag_leffler(double alpha, double beta_param, double z) {
    return mittag_leffler_sum({alpha, beta_param, z}).value;
}

}  // namespace fracrep
