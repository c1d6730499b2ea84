#pragma once

#include <climits>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fracrep/errors.hpp"

namespace fracrep {

enum class CoefficientFamily { Constant, Polynomial, Exponential, Sine, Cosine, Taylor };

[[nodiscard]] constexpr std::string_view to_string(CoefficientFamily f) noexcept {
    switch (f) {
        case CoefficientFamily::Constant: return "constant";
        case CoefficientFamily::Polynomial: return "polynomial";
        case CoefficientFamily::Exponential: return "exponential";
        case CoefficientFamily::Sine: return "sine";
        case CoefficientFamily::Cosine: return "cosine";
        case CoefficientFamily::Taylor: return "taylor";
    }
    return "unknown";
}

[[nodiscard]] inline std::optional<CoefficientFamily> parse_family(std::string_view name) {
    for (auto f : {CoefficientFamily::Constant, CoefficientFamily::Polynomial,
                   CoefficientFamily::Exponential, CoefficientFamily::Sine,
                   CoefficientFamily::Cosine, CoefficientFamily::Taylor}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

inline constexpr int kDefaultTaylorCap = 64;

/// An analytic function of time with exact derivatives of every order.
///
/// Parameter layout per family:
///   constant     [lambda]
///   polynomial   [c0, c1, ..., cd]          sum c_j t^j
///   exponential  [c] or [c, A]              A e^{c t}
///   sine         [A, omega, phi]            A sin(omega t + phi)
///   cosine       [A, omega, phi]            A cos(omega t + phi)
///   taylor       [a0, a1, ...] + radius     sum a_j t^j, truncated to derivative_cap terms
///
/// A scale factor multiplies the value and every derivative.
class AnalyticCoefficient {
public:
    static AnalyticCoefficient constant(double lambda) {
        return AnalyticCoefficient(CoefficientFamily::Constant, {lambda});
    }
    static AnalyticCoefficient polynomial(std::vector<double> coeffs) {
        return AnalyticCoefficient(CoefficientFamily::Polynomial, std::move(coeffs));
    }
    static AnalyticCoefficient exponential(double rate, double amplitude = 1.0) {
        return AnalyticCoefficient(CoefficientFamily::Exponential, {rate, amplitude});
    }
    static AnalyticCoefficient sine(double amplitude, double omega, double phase = 0.0) {
        return AnalyticCoefficient(CoefficientFamily::Sine, {amplitude, omega, phase});
    }
    static AnalyticCoefficient cosine(double amplitude, double omega, double phase = 0.0) {
        return AnalyticCoefficient(CoefficientFamily::Cosine, {amplitude, omega, phase});
    }
    static AnalyticCoefficient taylor(std::vector<double> coeffs, double radius,
                                      int derivative_cap = kDefaultTaylorCap) {
        AnalyticCoefficient c(CoefficientFamily::Taylor, std::move(coeffs));
        if (!(radius > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "taylor radius of convergence must be positive");
        }
        if (derivative_cap < 0) {
            throw Error(ErrorCode::InvalidArgument, "taylor derivative cap must be non-negative");
        }
        c.radius_ = radius;
        c.derivative_cap_ = derivative_cap;
        if (c.params_.size() > static_cast<std::size_t>(derivative_cap) + 1) {
            c.params_.resize(static_cast<std::size_t>(derivative_cap) + 1);
        }
        return c;
    }

    /// Generic construction from a family name and parameter list.
    static AnalyticCoefficient from_parts(CoefficientFamily family, std::vector<double> params,
                                          double radius = std::numeric_limits<double>::infinity(),
                                          int derivative_cap = kDefaultTaylorCap) {
        if (family == CoefficientFamily::Taylor) {
            return taylor(std::move(params), radius, derivative_cap);
        }
        return AnalyticCoefficient(family, std::move(params));
    }

    /// Restricts the coefficient to [0, T]. Taylor data must converge on it.
    [[nodiscard]] AnalyticCoefficient on(double horizon) const {
        if (!(horizon > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "coefficient horizon must be positive");
        }
        if (family_ == CoefficientFamily::Taylor && radius_ < horizon) {
            throw Error(ErrorCode::InvalidArgument,
                        "taylor radius of convergence " + std::to_string(radius_) +
                            " is smaller than the horizon " + std::to_string(horizon));
        }
        AnalyticCoefficient c = *this;
        c.horizon_ = horizon;
        return c;
    }

    /// Same function times s (value and all derivatives).
    [[nodiscard]] AnalyticCoefficient scaled(double s) const {
        AnalyticCoefficient c = *this;
        c.scale_ *= s;
        return c;
    }

    [[nodiscard]] CoefficientFamily family() const noexcept { return family_; }
    [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] int derivative_cap() const noexcept {
        return family_ == CoefficientFamily::Taylor ? derivative_cap_ : INT_MAX;
    }

    /// Highest order with a possibly nonzero derivative, if finite.
    [[nodiscard]] std::optional<int> last_nonzero_derivative() const {
        if (scale_ == 0.0) {
            return 0;
        }
        switch (family_) {
            case CoefficientFamily::Constant: return 0;
            case CoefficientFamily::Polynomial:
            case CoefficientFamily::Taylor: {
                int d = static_cast<int>(params_.size()) - 1;
                while (d > 0 && params_[static_cast<std::size_t>(d)] == 0.0) {
                    --d;
                }
                return std::max(d, 0);
            }
            default: return std::nullopt;
        }
    }

    /// True when a(t) is the same number for every t.
    [[nodiscard]] bool is_constant() const {
        auto d = last_nonzero_derivative();
        if (d && *d == 0) {
            return true;
        }
        if (family_ == CoefficientFamily::Exponential && params_[0] == 0.0) {
            return true;
        }
        if ((family_ == CoefficientFamily::Sine || family_ == CoefficientFamily::Cosine) &&
            (params_[0] == 0.0 || params_[1] == 0.0)) {
            return true;
        }
        return false;
    }

    /// a(0), meaningful when is_constant() holds.
    [[nodiscard]] double constant_value() const { return deriv_unchecked(0, 0.0); }

    [[nodiscard]] double value(double t) const { return deriv(0, t); }

    /// Exact derivative of the given order at t.
    [[nodiscard]] double deriv(int order, double t) const {
        check_domain(t);
        if (order < 0) {
            throw Error(ErrorCode::InvalidArgument, "derivative order must be non-negative");
        }
        if (family_ == CoefficientFamily::Taylor && order > derivative_cap_) {
            throw Error(ErrorCode::OrderTooHigh,
                        "derivative order " + std::to_string(order) + " exceeds taylor cap " +
                            std::to_string(derivative_cap_));
        }
        return deriv_unchecked(order, t);
    }

    friend bool operator==(const AnalyticCoefficient& a, const AnalyticCoefficient& b) {
        return a.family_ == b.family_ && a.params_ == b.params_ && a.scale_ == b.scale_ &&
               a.derivative_cap_ == b.derivative_cap_ &&
               (a.radius_ == b.radius_) && (a.horizon_ == b.horizon_);
    }

private:
    AnalyticCoefficient(CoefficientFamily family, std::vector<double> params)
        : family_(family), params_(std::move(params)) {
        validate();
    }

    void validate() {
        auto need = [&](std::size_t lo, std::size_t hi) {
            if (params_.size() < lo || params_.size() > hi) {
                throw Error(ErrorCode::InvalidArgument,
                            std::string(to_string(family_)) + " coefficient expects " +
                                std::to_string(lo) + (lo == hi ? "" : ".." + std::to_string(hi)) +
                                " parameters, got " + std::to_string(params_.size()));
            }
        };
        switch (family_) {
            case CoefficientFamily::Constant: need(1, 1); break;
            case CoefficientFamily::Polynomial:
            case CoefficientFamily::Taylor:
                need(1, std::numeric_limits<std::size_t>::max());
                break;
            case CoefficientFamily::Exponential:
                need(1, 2);
                if (params_.size() == 1) {
                    params_.push_back(1.0);
                }
                break;
            case CoefficientFamily::Sine:
            case CoefficientFamily::Cosine:
                need(2, 3);
                if (params_.size() == 2) {
                    params_.push_back(0.0);
                }
                break;
        }
        for (double p : params_) {
            if (!std::isfinite(p)) {
                throw Error(ErrorCode::InvalidArgument, "coefficient parameters must be finite");
            }
        }
    }

    void check_domain(double t) const {
        const double slack = 1e-12 * (std::isfinite(horizon_) ? std::max(1.0, horizon_) : 1.0);
        if (!(t >= -slack) || !(t <= horizon_ + slack)) {
            throw Error(ErrorCode::OutOfDomain,
                        "t = " + std::to_string(t) + " outside [0, " + std::to_string(horizon_) +
                            "]");
        }
    }

    // Derivative of sum c_j t^j by Horner on the differentiated coefficients.
    [[nodiscard]] double power_series_deriv(int order, double t) const {
        const auto n = static_cast<int>(params_.size());
        if (order >= n) {
            return 0.0;
        }
        double acc = 0.0;
        for (int j = n - 1; j >= order; --j) {
            double falling = 1.0;
            for (int q = 0; q < order; ++q) {
                falling *= static_cast<double>(j - q);
            }
            acc = acc * t + params_[static_cast<std::size_t>(j)] * falling;
        }
        return acc;
    }

    [[nodiscard]] double deriv_unchecked(int order, double t) const {
        double v = 0.0;
        switch (family_) {
            case CoefficientFamily::Constant: v = order == 0 ? params_[0] : 0.0; break;
            case CoefficientFamily::Polynomial:
            case CoefficientFamily::Taylor: v = power_series_deriv(order, t); break;
            case CoefficientFamily::Exponential:
                v = params_[1] * std::pow(params_[0], order) * std::exp(params_[0] * t);
                break;
            case CoefficientFamily::Sine:
            case CoefficientFamily::Cosine: {
                const double shift = family_ == CoefficientFamily::Cosine ? 1.0 : 0.0;
                // d^i/dt^i sin(x) = sin(x + i pi/2); reduce i mod 4 for an exact phase.
                const int quarter = static_cast<int>((order + static_cast<int>(shift)) % 4);
                const double x = params_[1] * t + params_[2];
                double s = 0.0;
                switch (quarter) {
                    case 0: s = std::sin(x); break;
                    case 1: s = std::cos(x); break;
                    case 2: s = -std::sin(x); break;
                    default: s = -std::cos(x); break;
                }
                v = params_[0] * std::pow(params_[1], order) * s;
                break;
            }
        }
        return scale_ * v;
    }

    CoefficientFamily family_;
    std::vector<double> params_;
    double scale_ = 1.0;
    double radius_ = std::numeric_limits<double>::infinity();
    int derivative_cap_ = kDefaultTaylorCap;
    double horizon_ = std::numeric_limits<double>::infinity();
};

[[nodiscard]] inline double coeff_value(const AnalyticCoefficient& c, double t) {
    return c.value(t);
}

[[nodiscard]] inline double coeff_deriv(const AnalyticCoefficient& c, int order, double t) {
    return c.deriv(order, t);
}

}  // namespace fracrep
