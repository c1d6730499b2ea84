#pragma once

// Spectral solver for  D_t^beta h + Psi(t) (-Laplacian)^alpha h = r(x, t)  on a
// periodic box [-L, L) with homogeneous initial data. Each discrete Fourier
// mode is an independent fractional ODE with coefficient |xi|^{2 alpha} Psi(t).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fracrep/coefficient.hpp"
#include "fracrep/errors.hpp"
#include "fracrep/grid.hpp"
#include "fracrep/parallel.hpp"
#include "fracrep/series.hpp"

namespace fracrep {

/// Periodic grid on [-L, L) with M nodes (M a power of two).
class SpatialGrid1D {
public:
    SpatialGrid1D(double half_width, std::size_t modes) : half_width_(half_width), modes_(modes) {
        if (!(half_width > 0.0) || !std::isfinite(half_width)) {
            throw Error(ErrorCode::InvalidArgument, "spatial half-width must be positive");
        }
        if (modes < 2 || (modes & (modes - 1)) != 0) {
            throw Error(ErrorCode::InvalidArgument, "mode count must be a power of two >= 2");
        }
    }

    [[nodiscard]] double half_width() const noexcept { return half_width_; }
    [[nodiscard]] std::size_t size() const noexcept { return modes_; }
    [[nodiscard]] double node(std::size_t m) const noexcept {
        return -half_width_ + 2.0 * half_width_ * static_cast<double>(m) / static_cast<double>(modes_);
    }
    /// Signed mode index in [-M/2, M/2) stored at DFT slot q.
    [[nodiscard]] long mode_index(std::size_t q) const noexcept {
        const auto m = static_cast<long>(modes_);
        const auto s = static_cast<long>(q);
        return s < m / 2 ? s : s - m;
    }
    [[nodiscard]] double frequency(std::size_t q) const noexcept {
        return std::numbers::pi * static_cast<double>(mode_index(q)) / half_width_;
    }
    /// DFT slot of a signed mode index.
    [[nodiscard]] std::size_t slot(long mode) const noexcept {
        const auto m = static_cast<long>(modes_);
        return static_cast<std::size_t>(((mode % m) + m) % m);
    }

    friend bool operator==(const SpatialGrid1D&, const SpatialGrid1D&) = default;

private:
    double half_width_;
    std::size_t modes_;
};

struct SymbolParams {
    double alpha_space = 1.0;

    void validate() const {
        if (!(alpha_space > 0.0) || alpha_space > 1.0) {
            throw Error(ErrorCode::InvalidArgument, "space order must lie in (0, 1]");
        }
    }
};

/// Fourier symbol of the fractional Laplacian, |xi|^{2 alpha}.
[[nodiscard]] inline double laplacian_symbol(double xi, const SymbolParams& p) {
    if (xi == 0.0) {
        return 0.0;
    }
    return std::pow(std::abs(xi), 2.0 * p.alpha_space);
}

/// Real samples on the time grid x spatial grid, row-major by time.
class SpaceTimeSamples {
public:
    SpaceTimeSamples(Grid time, SpatialGrid1D space)
        : time_(time), space_(space), values_(time.size() * space.size(), 0.0) {}

    [[nodiscard]] const Grid& time_grid() const noexcept { return time_; }
    [[nodiscard]] const SpatialGrid1D& space_grid() const noexcept { return space_; }
    [[nodiscard]] double& at(std::size_t ti, std::size_t xi) noexcept {
        return values_[ti * space_.size() + xi];
    }
    [[nodiscard]] double at(std::size_t ti, std::size_t xi) const noexcept {
        return values_[ti * space_.size() + xi];
    }
    [[nodiscard]] double max_abs() const noexcept {
        double m = 0.0;
        for (double v : values_) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

private:
    Grid time_;
    SpatialGrid1D space_;
    std::vector<double> values_;
};

enum class SpatialFamily { Constant, Cosine, Sine, Gaussian };

/// Closed-form spatial profile g(x) for separable forcing terms.
///   constant [c]; cosine/sine [A, xi, phi]; gaussian [A, center, width]
struct SpatialProfile {
    SpatialFamily family = SpatialFamily::Constant;
    std::vector<double> params{0.0};

    [[nodiscard]] double operator()(double x) const {
        switch (family) {
            case SpatialFamily::Constant: return params.at(0);
            case SpatialFamily::Cosine: return params.at(0) * std::cos(params.at(1) * x + param(2));
            case SpatialFamily::Sine: return params.at(0) * std::sin(params.at(1) * x + param(2));
            case SpatialFamily::Gaussian: {
                const double u = (x - params.at(1)) / params.at(2);
                return params.at(0) * std::exp(-0.5 * u * u);
            }
        }
        return 0.0;
    }

    friend bool operator==(const SpatialProfile&, const SpatialProfile&) = default;

private:
    [[nodiscard]] double param(std::size_t i) const { return i < params.size() ? params[i] : 0.0; }
};

struct SeparableTerm {
    SpatialProfile space;
    AnalyticCoefficient time;
};

/// r(x, t) = sum_terms g(x) q(t) sampled on the space-time grid.
[[nodiscard]] inline SpaceTimeSamples sample_forcing(const std::vector<SeparableTerm>& terms,
                                                     const SpatialGrid1D& sg, const Grid& tg) {
    SpaceTimeSamples r(tg, sg);
    for (const auto& term : terms) {
        for (std::size_t ti = 0; ti < tg.size(); ++ti) {
            const double q = term.time.value(tg.node(ti));
            for (std::size_t xi = 0; xi < sg.size(); ++xi) {
                r.at(ti, xi) += term.space(sg.node(xi)) * q;
            }
        }
    }
    return r;
}

namespace detail {

struct FftwDeleter {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

// In-place 1-D complex transform of length n, planned once.
class ComplexTransform {
public:
    ComplexTransform(std::size_t n, int sign)
        : n_(n),
          buffer_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))),
          plan_(fftw_plan_dft_1d(static_cast<int>(n), buffer_.get(), buffer_.get(), sign,
                                 FFTW_ESTIMATE)) {}
    ~ComplexTransform() { fftw_destroy_plan(plan_); }
    ComplexTransform(const ComplexTransform&) = delete;
    ComplexTransform& operator=(const ComplexTransform&) = delete;

    std::vector<std::complex<double>> run(const std::vector<std::complex<double>>& in) {
        for (std::size_t i = 0; i < n_; ++i) {
            buffer_.get()[i][0] = in[i].real();
            buffer_.get()[i][1] = in[i].imag();
        }
        fftw_execute(plan_);
        std::vector<std::complex<double>> out(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            out[i] = {buffer_.get()[i][0], buffer_.get()[i][1]};
        }
        return out;
    }

private:
    std::size_t n_;
    std::unique_ptr<fftw_complex, FftwDeleter> buffer_;
    fftw_plan plan_;
};

}  // namespace detail

struct PdeOptions {
    /// Modes whose forcing amplitude is at most this fraction of the largest
    /// one carry only transform round-off and are set to zero unsolved.
    double negligible_mode_rtol = 1e-12;
    /// When false, a mode that fails to converge raises ModeDivergence.
    bool allow_divergent_modes = false;
};

struct ModeSummary {
    long mode = 0;
    double frequency = 0.0;
    bool solved = false;
    bool converged = true;
    int k_used = 0;
};

struct PdeResult {
    SpaceTimeSamples h;
    double imag_residue = 0.0;   // max |Im h| / max |h| after the inverse transform
    std::vector<long> diverged_modes;
    std::vector<ModeSummary> modes;
};

/// Per-mode transformed forcing: rhat[q] is the time series of DFT slot q.
[[nodiscard]] inline std::vector<std::vector<std::complex<double>>> forward_transform(
    const SpaceTimeSamples& r) {
    const auto& sg = r.space_grid();
    const auto& tg = r.time_grid();
    std::vector<std::vector<std::complex<double>>> rhat(
        sg.size(), std::vector<std::complex<double>>(tg.size()));
    detail::ComplexTransform fft(sg.size(), FFTW_FORWARD);
    std::vector<std::complex<double>> row(sg.size());
    for (std::size_t ti = 0; ti < tg.size(); ++ti) {
        for (std::size_t xi = 0; xi < sg.size(); ++xi) {
            row[xi] = r.at(ti, xi);
        }
        const auto spec = fft.run(row);
        for (std::size_t q = 0; q < sg.size(); ++q) {
            rhat[q][ti] = spec[q];
        }
    }
    return rhat;
}

/// Solves one transformed mode: a(t) = |xi|^{2 alpha} Psi(t), b = rhat (complex,
/// solved as real and imaginary parts).
[[nodiscard]] inline std::pair<std::vector<std::complex<double>>, SolveReport> solve_mode(
    const std::vector<std::complex<double>>& rhat, const AnalyticCoefficient& psi, double beta,
    double symbol, const Grid& tg, const SeriesTruncation& trunc) {
    const AnalyticCoefficient a = psi.scaled(symbol);
    GridFunction re(tg);
    GridFunction im(tg);
    for (std::size_t ti = 0; ti < tg.size(); ++ti) {
        re[ti] = rhat[ti].real();
        im[ti] = rhat[ti].imag();
    }
    SolveReport re_report = series_solve(a, re, beta, trunc);
    const SolveReport im_report = series_solve(a, im, beta, trunc);
    std::vector<std::complex<double>> out(tg.size());
    for (std::size_t ti = 0; ti < tg.size(); ++ti) {
        out[ti] = {re_report.solution[ti], im_report.solution[ti]};
    }
    re_report.converged = re_report.converged && im_report.converged;
    re_report.k_used = std::max(re_report.k_used, im_report.k_used);
    return {std::move(out), std::move(re_report)};
}

/// Transform in x, solve every non-negligible mode with the series solver,
/// transform back. The modes run in parallel and write disjoint slots.
[[nodiscard]] inline PdeResult pde_solve(const SpaceTimeSamples& r, const AnalyticCoefficient& psi,
                                         double beta, const SymbolParams& p,
                                         const SeriesTruncation& trunc,
                                         const PdeOptions& options = {}) {
    if (!(beta > 0.0)) {
        throw Error(ErrorCode::InvalidOrder, "pde_solve needs beta > 0");
    }
    p.validate();
    trunc.validate();
    const auto& sg = r.space_grid();
    const auto& tg = r.time_grid();
    const auto rhat = forward_transform(r);

    std::vector<double> amplitude(sg.size(), 0.0);
    double largest = 0.0;
    for (std::size_t q = 0; q < sg.size(); ++q) {
        for (const auto& v : rhat[q]) {
            amplitude[q] = std::max(amplitude[q], std::abs(v));
        }
        largest = std::max(largest, amplitude[q]);
    }

    std::vector<std::vector<std::complex<double>>> hhat(
        sg.size(), std::vector<std::complex<double>>(tg.size()));
    std::vector<ModeSummary> summaries(sg.size());
    std::vector<std::exception_ptr> failures(sg.size());
    parallel_for(sg.size(), [&](std::size_t q) {
        ModeSummary& s = summaries[q];
        s.mode = sg.mode_index(q);
        s.frequency = sg.frequency(q);
        if (largest == 0.0 || amplitude[q] <= options.negligible_mode_rtol * largest) {
            return;
        }
        s.solved = true;
        try {
            auto [solution, report] = solve_mode(rhat[q], psi, beta,
                                                 laplacian_symbol(s.frequency, p), tg, trunc);
            hhat[q] = std::move(solution);
            s.converged = report.converged;
            s.k_used = report.k_used;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NonConvergence) {
                failures[q] = std::current_exception();
            }
            s.converged = false;
        } catch (...) {
            failures[q] = std::current_exception();
        }
    });
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    PdeResult result{SpaceTimeSamples(tg, sg), 0.0, {}, summaries};
    for (const auto& s : summaries) {
        if (!s.converged) {
            result.diverged_modes.push_back(s.mode);
        }
    }
    if (!result.diverged_modes.empty() && !options.allow_divergent_modes) {
        std::string list;
        for (long m : result.diverged_modes) {
            list += (list.empty() ? "" : ", ") + std::to_string(m);
        }
        throw Error(ErrorCode::ModeDivergence, "modes did not converge: " + list);
    }

    detail::ComplexTransform ifft(sg.size(), FFTW_BACKWARD);
    std::vector<std::complex<double>> row(sg.size());
    double max_real = 0.0;
    double max_imag = 0.0;
    const double norm = 1.0 / static_cast<double>(sg.size());
    for (std::size_t ti = 0; ti < tg.size(); ++ti) {
        for (std::size_t q = 0; q < sg.size(); ++q) {
            row[q] = hhat[q][ti];
        }
        const auto values = ifft.run(row);
        for (std::size_t xi = 0; xi < sg.size(); ++xi) {
            const double re = values[xi].real() * norm;
            result.h.at(ti, xi) = re;
            max_real = std::max(max_real, std::abs(re));
            max_imag = std::max(max_imag, std::abs(values[xi].imag() * norm));
        }
    }
    result.imag_residue = max_real > 0.0 ? max_imag / max_real : max_imag;
    return result;
}

/// Largest discrepancy, over three seeded random modes, between pde_solve on
/// the forcing cos(xi x) (1 + t) and a direct series_solve of that mode.
/// Modes are drawn from 1..max_mode (every positive mode when max_mode is 0);
/// high modes lie outside the range the series resolves in double precision.
[[nodiscard]] inline double mode_decouple_check(const SpatialGrid1D& sg, const SymbolParams& p,
                                                const AnalyticCoefficient& psi, double beta,
                                                const Grid& tg, const SeriesTruncation& trunc,
                                                std::uint64_t seed = 1, long max_mode = 0) {
    std::mt19937_64 rng(seed);
    long top = static_cast<long>(sg.size()) / 2 - 1;
    if (max_mode > 0) {
        top = std::min(top, max_mode);
    }
    std::uniform_int_distribution<long> pick(1, std::max(1L, top));
    const auto q_time = AnalyticCoefficient::polynomial({1.0, 1.0});
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        const long mode = pick(rng);
        const double xi = std::numbers::pi * static_cast<double>(mode) / sg.half_width();
        const SpaceTimeSamples r = sample_forcing(
            {{SpatialProfile{SpatialFamily::Cosine, {1.0, xi, 0.0}}, q_time}}, sg, tg);
        const PdeResult pde = pde_solve(r, psi, beta, p, trunc);
        const GridFunction b = sample([&](double t) { return q_time.value(t); }, tg);
        const SolveReport direct = series_solve(psi.scaled(laplacian_symbol(xi, p)), b, beta, trunc);
        for (std::size_t ti = 0; ti < tg.size(); ++ti) {
            for (std::size_t xj = 0; xj < sg.size(); ++xj) {
                const double expected = std::cos(xi * sg.node(xj)) * direct.solution[ti];
                worst = std::max(worst, std::abs(pde.h.at(ti, xj) - expected));
            }
        }
    }
    return worst;
}

}  // namespace fracrep
