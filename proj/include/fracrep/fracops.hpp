#pragma once

// Riemann-Liouville fractional integrals on uniform grids by product-trapezoidal
// convolution quadrature, and the Caputo derivative used to check residuals.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracrep/coefficient.hpp"
#include "fracrep/errors.hpp"
#include "fracrep/grid.hpp"
#include "fracrep/parallel.hpp"
#include "fracrep/specfun.hpp"

namespace fracrep {

/// Order of a fractional derivative, beta > 0, with n = floor(beta) + 1.
class FracOrder {
public:
    explicit FracOrder(double beta) : beta_(beta) {
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw Error(ErrorCode::InvalidOrder, "fractional order must be positive");
        }
        n_ceil_ = static_cast<int>(std::floor(beta)) + 1;
    }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] int n_ceil() const noexcept { return n_ceil_; }

private:
    double beta_;
    int n_ceil_;
};

/// Product-trapezoidal weights for y(t_j) = int_0^{t_j} K(t_j - s) f(s) ds with
/// f piecewise linear. For the subinterval [t_m, t_{m+1}] at offset d = j - m:
///   far[d]  multiplies f_m      (int K(u) (u - (d-1)h) du / h over [(d-1)h, dh])
///   near[d] multiplies f_{m+1}  (int K(u) (dh - u) du / h over the same span)
struct ConvolutionWeights {
    std::vector<double> far;   // index d = 1..N-1, entry 0 unused
    std::vector<double> near;  // same indexing
};

namespace detail {

// u^p - v^p for u = d h, v = (d-1) h, d >= 1, without cancellation.
inline double power_difference(double p, double u, double d) {
    if (d <= 1.0) {
        return std::pow(u, p);
    }
    return -std::pow(u, p) * std::expm1(p * std::log1p(-1.0 / d));
}

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre nodes by Newton iteration on P_n, mapped to [0, 1].
inline GaussLegendreRule gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
        rule.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace detail

/// Weights for the Riemann-Liouville kernel u^{alpha-1}/Gamma(alpha), integrated exactly.
[[nodiscard]] inline ConvolutionWeights rl_weights(double alpha, double h, std::size_t points) {
    ConvolutionWeights w;
    w.far.assign(points, 0.0);
    w.near.assign(points, 0.0);
    const double scale = recip_gamma(alpha + 2.0) / h;
    for (std::size_t di = 1; di < points; ++di) {
        const auto d = static_cast<double>(di);
        const double u = d * h;
        const double lo = (d - 1.0) * h;
        const double diff_a1 = detail::power_difference(alpha + 1.0, u, d);  // u^{a+1} - lo^{a+1}
        const double diff_a = detail::power_difference(alpha, u, d);         // u^a - lo^a
        w.far[di] = scale * (alpha * diff_a1 - (alpha + 1.0) * lo * diff_a);
        w.near[di] = scale * ((alpha + 1.0) * u * diff_a - alpha * diff_a1);
    }
    return w;
}

/// Applies product-trapezoidal weights to f. Output node 0 is always 0.
[[nodiscard]] inline GridFunction apply_convolution(const ConvolutionWeights& w,
                                                    const GridFunction& f) {
    const std::size_t n = f.size();
    // Combined weight of f_m for m >= 1 at offset e = j - m.
    std::vector<double> combined(n, 0.0);
    if (n > 1) {
        combined[0] = w.near[1];
    }
    for (std::size_t e = 1; e + 1 < n; ++e) {
        combined[e] = w.far[e] + w.near[e + 1];
    }
    GridFunction out(f.grid());
    const auto values = f.values();
    auto result = out.values();
    parallel_for(n - 1, [&](std::size_t idx) {
        const std::size_t j = idx + 1;
        CompensatedSum acc;
        acc.add(w.far[j] * values[0]);
        for (std::size_t m = 1; m <= j; ++m) {
            acc.add(combined[j - m] * values[m]);
        }
        result[j] = acc.value();
    });
    result[0] = 0.0;
    return out;
}

/// Riemann-Liouville fractional integral I^alpha f on the grid of f.
[[nodiscard]] inline GridFunction rl_integral(const GridFunction& f, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorCode::InvalidOrder,
                    "integral order must be positive, got " + std::to_string(alpha));
    }
    return apply_convolution(rl_weights(alpha, f.grid().step(), f.size()), f);
}

namespace detail {

// f^{(j)}(0) for j < count from the interpolating polynomial through the
// first count + 2 nodes.
inline std::vector<double> endpoint_derivatives(const GridFunction& f, int count) {
    const int p = count + 1;  // polynomial degree
    const auto size = static_cast<std::size_t>(p + 1);
    // Vandermonde system in s = t / h: sum_q c_q s^q = f(s) at s = 0..p.
    std::vector<double> a(size * size);
    std::vector<double> rhs(size);
    for (std::size_t r = 0; r < size; ++r) {
        double pw = 1.0;
        for (std::size_t q = 0; q < size; ++q) {
            a[r * size + q] = pw;
            pw *= static_cast<double>(r);
        }
        rhs[r] = f[r];
    }
    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < size; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < size; ++r) {
            if (std::abs(a[r * size + col]) > std::abs(a[piv * size + col])) {
                piv = r;
            }
        }
        if (piv != col) {
            for (std::size_t q = 0; q < size; ++q) {
                std::swap(a[col * size + q], a[piv * size + q]);
            }
            std::swap(rhs[col], rhs[piv]);
        }
        for (std::size_t r = col + 1; r < size; ++r) {
            const double factor = a[r * size + col] / a[col * size + col];
            for (std::size_t q = col; q < size; ++q) {
                a[r * size + q] -= factor * a[col * size + q];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    std::vector<double> c(size);
    for (std::size_t r = size; r-- > 0;) {
        double s = rhs[r];
        for (std::size_t q = r + 1; q < size; ++q) {
            s -= a[r * size + q] * c[q];
        }
        c[r] = s / a[r * size + r];
    }
    const double h = f.grid().step();
    std::vector<double> out(static_cast<std::size_t>(count));
    double fact = 1.0;
    for (int j = 0; j < count; ++j) {
        if (j > 0) {
            fact *= j;
        }
        out[static_cast<std::size_t>(j)] = fact * c[static_cast<std::size_t>(j)] / std::pow(h, j);
    }
    return out;
}

// Second-order first derivative: central inside, one-sided at both ends.
inline GridFunction differentiate(const GridFunction& g) {
    const std::size_t n = g.size();
    const double h = g.grid().step();
    GridFunction out(g.grid());
    out[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        out[j] = (g[j + 1] - g[j - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h);
    return out;
}

}  // namespace detail

/// Caputo derivative of order beta: f minus its degree n-1 Taylor polynomial
/// at 0, integrated to order n - beta, then differentiated n times on the grid.
///
/// taylor_at_zero, when given, supplies f^{(j)}(0) for j < n; otherwise they
/// are estimated from the first few nodes.
[[nodiscard]] inline GridFunction caputo_derivative(
    const GridFunction& f, FracOrder order,
    std::optional<std::span<const double>> taylor_at_zero = std::nullopt) {
    const int n = order.n_ceil();
    if (f.size() < static_cast<std::size_t>(8 * n)) {
        throw Error(ErrorCode::GridTooCoarse,
                    "caputo derivative of order " + std::to_string(order.beta()) + " needs at least " +
                        std::to_string(8 * n) + " nodes");
    }
    std::vector<double> taylor;
    if (taylor_at_zero) {
        if (taylor_at_zero->size() < static_cast<std::size_t>(n)) {
            throw Error(ErrorCode::InvalidArgument, "not enough Taylor coefficients supplied");
        }
        taylor.assign(taylor_at_zero->begin(), taylor_at_zero->begin() + n);
    } else {
        taylor = detail::endpoint_derivatives(f, n);
    }
    const Grid& grid = f.grid();
    GridFunction g = f;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.node(j);
        double poly = 0.0;
        double term = 1.0;
        for (int q = 0; q < n; ++q) {
            poly += taylor[static_cast<std::size_t>(q)] * term;
            term *= t / (q + 1);
        }
        g[j] -= poly;
    }
    GridFunction out = rl_integral(g, n - order.beta());
    for (int q = 0; q < n; ++q) {
        out = detail::differentiate(out);
    }
    return out;
}

/// First node included in residual checks: the leading ceil(5%) of nodes
/// carry the start-up singularity and are skipped.
[[nodiscard]] inline std::size_t residual_start(std::size_t points) {
    return static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(points)));
}

/// max |D^beta y + a y - b| over interior nodes past the start-up region.
/// y is taken to satisfy homogeneous initial data.
[[nodiscard]] inline double residual(const GridFunction& y, const AnalyticCoefficient& a,
                                     const GridFunction& b, FracOrder order) {
    if (!(y.grid() == b.grid())) {
        throw Error(ErrorCode::InvalidArgument, "solution and forcing live on different grids");
    }
    const std::vector<double> zeros(static_cast<std::size_t>(order.n_ceil()), 0.0);
    const GridFunction d = caputo_derivative(y, order, std::span<const double>(zeros));
    const Grid& grid = y.grid();
    double worst = 0.0;
    for (std::size_t j = residual_start(grid.size()); j + 1 < grid.size(); ++j) {
        const double r = d[j] + a.value(grid.node(j)) * y[j] - b[j];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace fracrep
