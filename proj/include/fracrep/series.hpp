#pragma once

// Single-integral series for  D^beta y + a(t) y = b(t)  with homogeneous data:
//
//   y = sum_k sum_n (-1)^k (-beta choose n) [bracket_{k,n}(t)] I^{(k+1)beta+n} b(t)
//
// where bracket_{k,n} sums sk_coefficient * a^{(i_1)} ... a^{(i_k)} over the
// weak compositions of n into k parts. Every summand needs only one fractional
// integral of the forcing.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fracrep/coefficient.hpp"
#include "fracrep/compositions.hpp"
#include "fracrep/fracops.hpp"
#include "fracrep/grid.hpp"
#include "fracrep/parallel.hpp"
#include "fracrep/specfun.hpp"

namespace fracrep {

struct SeriesTruncation {
    int k_max = 16;
    int n_max = 16;
    double tol = 1e-8;

    void validate() const {
        if (k_max < 0 || n_max < 0) {
            throw Error(ErrorCode::InvalidArgument, "truncation caps must be non-negative");
        }
        if (!(tol > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "truncation tolerance must be positive");
        }
    }
    friend bool operator==(const SeriesTruncation&, const SeriesTruncation&) = default;
};

/// One (k, n) summand's contribution, for diagnostics.
struct TermNorm {
    int k = 0;
    int n = 0;
    double norm = 0.0;
};

struct StageTimings {
    double integrals = 0.0;
    double brackets = 0.0;
    double assembly = 0.0;
    double total = 0.0;
};

enum class SolvePath { Series, MittagLeffler };

struct SolveReport {
    explicit SolveReport(GridFunction y) : solution(std::move(y)) {}

    GridFunction solution;
    SolvePath path = SolvePath::Series;
    int k_used = 0;
    std::vector<int> n_used;                  // per k = 0..k_used, last n included
    std::vector<TermNorm> term_norms;         // every evaluated (k, n) summand
    std::vector<double> layer_norms;          // max-norm of each k-layer
    std::vector<GridFunction> partial_sums;   // solution after layers 0..k
    bool k_cap_hit = false;                   // stopped at k_max with a live layer
    bool n_cap_hit = false;                   // some n-loop ended at n_max with a live term
    bool converged = true;
    StageTimings timings;
};

struct SolveOptions {
    bool constant_fast_path = true;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// table[i][j] = a^{(i)}(t_j) / i!
inline std::vector<std::vector<double>> scaled_derivative_table(const AnalyticCoefficient& a,
                                                                const Grid& grid, int max_order) {
    std::vector<std::vector<double>> table(static_cast<std::size_t>(max_order) + 1,
                                           std::vector<double>(grid.size()));
    double inv_fact = 1.0;
    for (int i = 0; i <= max_order; ++i) {
        if (i > 0) {
            inv_fact /= i;
        }
        auto& row = table[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < grid.size(); ++j) {
            row[j] = a.deriv(i, grid.node(j)) * inv_fact;
        }
    }
    return table;
}

// Largest n worth summing for layer k.
inline int effective_n_cap(const AnalyticCoefficient& a, int k, int n_max) {
    int cap = n_max;
    if (auto d = a.last_nonzero_derivative()) {
        cap = std::min(cap, *d * k);
    }
    return std::min(cap, a.derivative_cap());
}

/// bracket_{k,n}(t_j) for n = 0..n_cap at every node, by accumulating over the
/// partial sums s_1, ..., s_{k-1} of the composition rather than over the
/// compositions themselves. O(k n_cap^2) work per node.
class BracketEvaluator {
public:
    BracketEvaluator(double beta, const std::vector<std::vector<double>>& scaled_derivs)
        : beta_(beta), derivs_(scaled_derivs) {}

    /// Rows n = 0..n_cap of bracket_{k,n}, each with one value per node.
    [[nodiscard]] std::vector<std::vector<double>> layer(int k, int n_cap) const {
        const std::size_t nodes = derivs_.front().size();
        const auto rows = static_cast<std::size_t>(n_cap) + 1;
        std::vector<std::vector<double>> out(rows, std::vector<double>(nodes, 0.0));
        if (k == 1) {
            for (std::size_t n = 0; n < rows; ++n) {
                // bracket_{1,n} = a^{(n)}
                double fact = 1.0;
                for (std::size_t q = 2; q <= n; ++q) {
                    fact *= static_cast<double>(q);
                }
                for (std::size_t j = 0; j < nodes; ++j) {
                    out[n][j] = derivs_[n][j] * fact;
                }
            }
            return out;
        }
        // pi_j(m) = prod_{q<m} (-j beta - q); the paired factorial quotients are
        // ratios of these products.
        auto falling = [&](int j, int from, int to) {
            double p = 1.0;
            for (int q = from; q < to; ++q) {
                p *= -j * beta_ - q;
            }
            return p;
        };
        // V[s] after step j: partial sums over (i_1..i_j) with s_j = s.
        std::vector<std::vector<double>> v(rows, std::vector<double>(nodes, 0.0));
        for (std::size_t s = 0; s < rows; ++s) {
            const double w = falling(1, 0, static_cast<int>(s));
            for (std::size_t j = 0; j < nodes; ++j) {
                v[s][j] = w * derivs_[s][j];
            }
        }
        std::vector<std::vector<double>> next(rows, std::vector<double>(nodes, 0.0));
        for (int step = 2; step <= k - 1; ++step) {
            for (std::size_t s2 = 0; s2 < rows; ++s2) {
                auto& dst = next[s2];
                std::fill(dst.begin(), dst.end(), 0.0);
                for (std::size_t s = 0; s <= s2; ++s) {
                    const double w = falling(step, static_cast<int>(s), static_cast<int>(s2));
                    const auto& src = v[s];
                    const auto& d = derivs_[s2 - s];
                    for (std::size_t j = 0; j < nodes; ++j) {
                        dst[j] += w * src[j] * d[j];
                    }
                }
            }
            std::swap(v, next);
        }
        for (std::size_t n = 0; n < rows; ++n) {
            double lead = 1.0;  // n! / pi_1(n)
            for (std::size_t q = 1; q <= n; ++q) {
                lead *= static_cast<double>(q) / (-beta_ - static_cast<double>(q - 1));
            }
            auto& dst = out[n];
            for (std::size_t s = 0; s <= n; ++s) {
                const double w = lead * falling(k, static_cast<int>(s), static_cast<int>(n));
                const auto& src = v[s];
                const auto& d = derivs_[n - s];
                for (std::size_t j = 0; j < nodes; ++j) {
                    dst[j] += w * src[j] * d[j];
                }
            }
        }
        return out;
    }

private:
    double beta_;
    const std::vector<std::vector<double>>& derivs_;
};

// I^{order} b, computed once per distinct order.
class IntegralTable {
public:
    explicit IntegralTable(const GridFunction& b) : b_(b) {}
    const GridFunction& get(double order) {
        auto it = cache_.find(order);
        if (it == cache_.end()) {
            it = cache_.emplace(order, rl_integral(b_, order)).first;
        }
        return it->second;
    }

private:
    const GridFunction& b_;
    std::map<double, GridFunction> cache_;
};

// Kernel u^{beta-1} E_{beta,beta}(-lambda u^beta); throws when the Taylor
// summation loses more than ten digits to cancellation.
inline double mittag_leffler_kernel_factor(double beta, double alpha_param, double z) {
    const auto ml = mittag_leffler_sum({beta, alpha_param, z});
    if (ml.max_term * 2.220446049250313e-16 > 1e-10) {
        throw Error(ErrorCode::NonConvergence,
                    "Mittag-Leffler kernel argument " + std::to_string(z) +
                        " is outside the reliable Taylor range");
    }
    return ml.value;
}

}  // namespace detail

/// Single (k, n) summand of S_k, without the (-1)^k sign:
/// (-beta choose n) I^{(k+1)beta+n} b(t) * sum_comp sk_coefficient * prod a^{(i_j)}(t).
///
/// The composition sum is enumerated explicitly. Compositions sharing a
/// multiset of parts share their derivative product, so coefficients are
/// merged per multiset before the node loop.
[[nodiscard]] inline GridFunction sk_term(const AnalyticCoefficient& a, const GridFunction& b,
                                          double beta, int k, int n) {
    if (!(beta > 0.0)) {
        throw Error(ErrorCode::InvalidOrder, "sk_term needs beta > 0");
    }
    if (k < 0 || n < 0) {
        throw Error(ErrorCode::InvalidArgument, "sk_term needs k >= 0 and n >= 0");
    }
    const Grid& grid = b.grid();
    if (k == 0) {
        return n == 0 ? rl_integral(b, beta) : GridFunction(grid);
    }
    std::map<std::vector<int>, double> merged;
    CompositionStream stream(n, k);
    Composition comp;
    while (stream.next(comp)) {
        std::vector<int> key = comp.parts;
        std::sort(key.begin(), key.end());
        merged[key] += sk_coefficient(beta, comp);
    }
    std::vector<std::vector<double>> derivs(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        auto& row = derivs[static_cast<std::size_t>(i)];
        row.resize(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            row[j] = a.deriv(i, grid.node(j));
        }
    }
    const GridFunction integral = rl_integral(b, (k + 1) * beta + n);
    const double binom = gen_binomial(-beta, n);
    GridFunction out(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        double bracket = 0.0;
        for (const auto& [parts, coeff] : merged) {
            double product = coeff;
            for (int part : parts) {
                product *= derivs[static_cast<std::size_t>(part)][j];
            }
            bracket += product;
        }
        out[j] = binom * bracket * integral[j];
    }
    return out;
}

/// y(t) = int_0^t (t-s)^{beta-1} E_{beta,beta}(-lambda (t-s)^beta) b(s) ds by
/// product-trapezoidal convolution. The first subinterval uses the closed-form
/// kernel moments (termwise-integrated Mittag-Leffler series); the others use
/// 12-point Gauss-Legendre on the smooth kernel.
[[nodiscard]] inline GridFunction constant_coeff_solve(double lambda, const GridFunction& b,
                                                       double beta) {
    if (!(beta > 0.0)) {
        throw Error(ErrorCode::InvalidOrder, "constant_coeff_solve needs beta > 0");
    }
    if (lambda == 0.0) {
        return rl_integral(b, beta);
    }
    const std::size_t points = b.size();
    const double h = b.grid().step();
    ConvolutionWeights w;
    w.far.assign(points, 0.0);
    w.near.assign(points, 0.0);
    {
        const double z = -lambda * std::pow(h, beta);
        const double e1 = detail::mittag_leffler_kernel_factor(beta, beta + 1.0, z);
        const double e2 = detail::mittag_leffler_kernel_factor(beta, beta + 2.0, z);
        const double f0 = std::pow(h, beta) * e1;                 // int_0^h K
        const double f1 = std::pow(h, beta + 1.0) * (e1 - e2);    // int_0^h u K
        w.far[1] = f1 / h;
        w.near[1] = f0 - f1 / h;
    }
    static const detail::GaussLegendreRule rule = detail::gauss_legendre(12);
    for (std::size_t di = 2; di < points; ++di) {
        const auto d = static_cast<double>(di);
        double far = 0.0;
        double near = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double x = rule.nodes[q];
            const double u = (d - 1.0 + x) * h;
            const double ub = std::pow(u, beta);
            const double kernel =
                ub / u * detail::mittag_leffler_kernel_factor(beta, beta, -lambda * ub);
            far += rule.weights[q] * kernel * x;
            near += rule.weights[q] * kernel * (1.0 - x);
        }
        w.far[di] = h * far;
        w.near[di] = h * near;
    }
    return apply_convolution(w, b);
}

/// Sums the double series over k = 0..k_max (outer) and n = 0..n_max (inner).
///
/// Layer k stops its n-loop at the first summand with max-norm below
/// tol / (k_max + 1); the k-loop stops once a whole layer is below tol.
/// Truncation never throws: caps that were hit are reported as flags.
[[nodiscard]] inline SolveReport series_solve(const AnalyticCoefficient& a, const GridFunction& b,
                                              double beta, const SeriesTruncation& trunc,
                                              const SolveOptions& options = {}) {
    if (!(beta > 0.0)) {
        throw Error(ErrorCode::InvalidOrder, "series_solve needs beta > 0");
    }
    trunc.validate();
    const auto start = detail::Clock::now();
    const Grid& grid = b.grid();

    if (options.constant_fast_path && a.is_constant()) {
        const double lambda = a.constant_value();
        SolveReport report{constant_coeff_solve(lambda, b, beta)};
        report.path = SolvePath::MittagLeffler;
        report.n_used = {0};
        report.layer_norms = {report.solution.max_norm()};
        report.partial_sums = {report.solution};
        report.timings.integrals = detail::seconds_since(start);
        report.timings.total = report.timings.integrals;
        return report;
    }

    detail::IntegralTable integrals(b);
    auto t0 = detail::Clock::now();
    SolveReport report{integrals.get(beta)};
    report.timings.integrals += detail::seconds_since(t0);
    report.n_used = {0};
    report.term_norms.push_back({0, 0, report.solution.max_norm()});
    report.layer_norms.push_back(report.solution.max_norm());
    report.partial_sums.push_back(report.solution);

    if (a.is_constant() && a.constant_value() == 0.0) {
        report.timings.total = detail::seconds_since(start);
        return report;  // every layer vanishes; converged with k_used = 0
    }

    const int max_order = trunc.k_max == 0 ? 0 : detail::effective_n_cap(a, trunc.k_max, trunc.n_max);
    t0 = detail::Clock::now();
    const auto derivs = detail::scaled_derivative_table(a, grid, max_order);
    const detail::BracketEvaluator brackets(beta, derivs);
    report.timings.brackets += detail::seconds_since(t0);

    const double term_tol = trunc.tol / (trunc.k_max + 1);
    bool layer_settled = false;
    for (int k = 1; k <= trunc.k_max; ++k) {
        const int n_cap = detail::effective_n_cap(a, k, trunc.n_max);
        t0 = detail::Clock::now();
        const auto rows = brackets.layer(k, n_cap);
        report.timings.brackets += detail::seconds_since(t0);

        GridFunction layer(grid);
        int n_last = -1;
        bool term_settled = false;
        for (int n = 0; n <= n_cap; ++n) {
            t0 = detail::Clock::now();
            const GridFunction& integral = integrals.get((k + 1) * beta + n);
            report.timings.integrals += detail::seconds_since(t0);
            t0 = detail::Clock::now();
            const double binom = gen_binomial(-beta, n);
            const auto& row = rows[static_cast<std::size_t>(n)];
            GridFunction term(grid);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                term[j] = binom * row[j] * integral[j];
            }
            const double norm = term.max_norm();
            report.term_norms.push_back({k, n, norm});
            layer += term;
            n_last = n;
            report.timings.assembly += detail::seconds_since(t0);
            if (norm < term_tol) {
                term_settled = true;
                break;
            }
        }
        // Past the last nonzero derivative of a polynomial every summand is zero.
        const bool exhausted = n_cap < trunc.n_max && n_cap < a.derivative_cap();
        if (!term_settled && !exhausted) {
            report.n_cap_hit = true;
        }
        const double layer_norm = layer.max_norm();
        if (k % 2 == 1) {
            report.solution -= layer;
        } else {
            report.solution += layer;
        }
        report.k_used = k;
        report.n_used.push_back(n_last);
        report.layer_norms.push_back(layer_norm);
        report.partial_sums.push_back(report.solution);
        if (layer_norm < trunc.tol) {
            layer_settled = true;
            break;
        }
    }
    report.k_cap_hit = !layer_settled;
    report.converged = !report.k_cap_hit && !report.n_cap_hit;
    report.timings.total = detail::seconds_since(start);
    return report;
}

}  // namespace fracrep
