#pragma once

// The solve / verify / identity / bench commands behind the command-line
// tool. Each returns the process exit code and writes human-readable lines to
// the given stream; file outputs go under out_dir and are written atomically.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include "fracrep/errors.hpp"
#include "fracrep/fracops.hpp"
#include "fracrep/identities.hpp"
#include "fracrep/io.hpp"
#include "fracrep/neumann.hpp"
#include "fracrep/pde.hpp"
#include "fracrep/problem_spec.hpp"
#include "fracrep/series.hpp"

namespace fracrep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitIdentityFailure = 3;

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    std::uint64_t seed = 1;
    bool write_timings = false;  // solve: also write timings.json
};

namespace detail {

using nlohmann::json;

inline std::string fmt(double x) { return io::format_double(x); }

inline int solve_ode(const ProblemSpec& spec, const CommandOptions& opt, std::ostream& log) {
    const auto a = spec.coefficient.build(spec.horizon);
    const GridFunction b = ode_forcing(spec);
    const SolveReport report = series_solve(a, b, spec.beta, spec.truncation);
    json doc;
    doc["spec"] = to_json(spec);
    doc["seed"] = opt.seed;
    doc["report"] = io::report_json(report);
    io::write_atomic(opt.out_dir / spec.output.solution, io::grid_function_csv(report.solution));
    io::write_atomic(opt.out_dir / spec.output.report, io::dump(doc));
    if (opt.write_timings) {
        io::write_atomic(opt.out_dir / "timings.json", io::dump(io::timings_json(report.timings)));
    }
    log << "path: " << (report.path == SolvePath::Series ? "series" : "mittag-leffler") << "\n"
        << "k_used: " << report.k_used << "\n"
        << "converged: " << (report.converged ? "yes" : "no") << "\n"
        << "k_cap_hit: " << (report.k_cap_hit ? "yes" : "no")
        << "  n_cap_hit: " << (report.n_cap_hit ? "yes" : "no") << "\n"
        << "y(T) = " << fmt(report.solution[report.solution.size() - 1]) << "\n";
    return report.converged ? kExitOk : kExitNotConverged;
}

inline int solve_pde(const ProblemSpec& spec, const CommandOptions& opt, std::ostream& log) {
    const auto psi = spec.coefficient.build(spec.horizon);
    const SpaceTimeSamples r = pde_forcing(spec);
    PdeOptions po;
    po.allow_divergent_modes = true;
    const PdeResult result =
        pde_solve(r, psi, spec.beta, SymbolParams{spec.pde->alpha}, spec.truncation, po);
    json doc;
    doc["spec"] = to_json(spec);
    doc["seed"] = opt.seed;
    doc["diagnostics"] = io::pde_json(result);
    io::write_atomic(opt.out_dir / spec.output.solution, io::space_time_csv(result.h));
    io::write_atomic(opt.out_dir / spec.output.report, io::dump(doc));
    std::size_t solved = 0;
    for (const auto& m : result.modes) {
        solved += m.solved ? 1 : 0;
    }
    log << "modes solved: " << solved << " of " << result.modes.size() << "\n"
        << "diverged modes: " << result.diverged_modes.size() << "\n"
        << "imaginary residue: " << fmt(result.imag_residue) << "\n";
    return result.diverged_modes.empty() ? kExitOk : kExitNotConverged;
}

}  // namespace detail

/// Solves the problem in the spec; 0 on success, 2 when truncation left the
/// series unconverged, 1 on any error.
inline int cmd_solve(const std::filesystem::path& spec_path, const CommandOptions& opt,
                     std::ostream& log, std::ostream& err) {
    try {
        const ProblemSpec spec = load_problem_spec(spec_path);
        log << "seed: " << opt.seed << "\n";
        return spec.kind == ProblemKind::Ode ? detail::solve_ode(spec, opt, log)
                                             : detail::solve_pde(spec, opt, log);
    } catch (const std::exception& e) {
        err << "error: " << spec_path.string() << ": " << e.what() << "\n";
        return kExitError;
    }
}

/// Cross-checks series_solve against the nested Neumann series (and, for a
/// constant coefficient, the Mittag-Leffler solution). Exit 0 iff the
/// series/Neumann discrepancy is within the spec tolerance.
inline int cmd_verify(const std::filesystem::path& spec_path, const CommandOptions& opt,
                      std::ostream& log, std::ostream& err) {
    using nlohmann::json;
    try {
        const ProblemSpec spec = load_problem_spec(spec_path);
        if (spec.kind != ProblemKind::Ode) {
            throw Error(ErrorCode::InvalidArgument, "verify needs an ode spec");
        }
        const auto a = spec.coefficient.build(spec.horizon);
        const GridFunction b = ode_forcing(spec);
        const FracOrder order(spec.beta);
        // The constant-coefficient shortcut is disabled so the series itself is tested.
        const SolveReport series =
            series_solve(a, b, spec.beta, spec.truncation, SolveOptions{false});
        const NeumannResult neumann =
            neumann_solve(a, b, spec.beta, spec.verify.neumann_k_max, spec.verify.neumann_tol);
        const double discrepancy = max_abs_difference(series.solution, neumann.solution);
        const double res_series = residual(series.solution, a, b, order);
        const double res_neumann = residual(neumann.solution, a, b, order);
        const bool passed = discrepancy <= spec.verify.tolerance;

        log << "seed: " << opt.seed << "\n"
            << "series vs neumann max-norm discrepancy: " << detail::fmt(discrepancy) << "\n"
            << "series residual: " << detail::fmt(res_series) << "\n"
            << "neumann residual: " << detail::fmt(res_neumann) << "\n";

        json doc;
        doc["spec"] = to_json(spec);
        doc["seed"] = opt.seed;
        doc["discrepancy"] = discrepancy;
        doc["tolerance"] = spec.verify.tolerance;
        doc["residual"] = {{"series", res_series}, {"neumann", res_neumann}};
        doc["series"] = {{"k_used", series.k_used},
                         {"converged", series.converged},
                         {"k_cap_hit", series.k_cap_hit},
                         {"n_cap_hit", series.n_cap_hit},
                         {"layer_norms", series.layer_norms}};
        doc["neumann"] = io::neumann_json(neumann);
        if (a.is_constant()) {
            const GridFunction ml = constant_coeff_solve(a.constant_value(), b, spec.beta);
            const double s_ml = max_abs_difference(series.solution, ml);
            const double n_ml = max_abs_difference(neumann.solution, ml);
            log << "series vs mittag-leffler: " << detail::fmt(s_ml) << "\n"
                << "neumann vs mittag-leffler: " << detail::fmt(n_ml) << "\n";
            doc["mittag_leffler"] = {{"series_discrepancy", s_ml}, {"neumann_discrepancy", n_ml}};
        }
        doc["passed"] = passed;
        io::write_atomic(opt.out_dir / "verify_report.json", io::dump(doc));
        log << (passed ? "PASS" : "FAIL") << " (tolerance " << detail::fmt(spec.verify.tolerance)
            << ")\n";
        return passed ? kExitOk : kExitNotConverged;
    } catch (const std::exception& e) {
        err << "error: " << spec_path.string() << ": " << e.what() << "\n";
        return kExitError;
    }
}

/// Randomized identity suite. Exit 3 on the first failing parameter tuple,
/// 1 on a usage error.
inline int cmd_identity(std::uint64_t seed, int trials, std::optional<int> forced_a,
                        std::ostream& log, std::ostream& err) {
    if (trials < 1) {
        err << "error: --trials must be at least 1\n";
        return kExitError;
    }
    if (forced_a && *forced_a < 0) {
        err << "error: --force-a must be a non-negative integer\n";
        return kExitError;
    }
    IdentityTrialOptions opt;
    opt.forced_a = forced_a;
    std::vector<IdentityCheck> checks;
    try {
        checks = run_identity_trials(seed, trials, opt);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::size_t passed = 0;
    const IdentityCheck* first_failure = nullptr;
    for (const auto& c : checks) {
        if (c.passed) {
            ++passed;
        } else if (!first_failure) {
            first_failure = &c;
        }
    }
    log << "seed: " << seed << "\n"
        << "trials: " << trials << "\n"
        << "checks passed: " << passed << "\n"
        << "checks failed: " << checks.size() - passed << "\n";
    if (first_failure) {
        err << "identity failure [" << first_failure->kind << "] " << first_failure->parameters
            << ": lhs " << detail::fmt(first_failure->lhs) << " rhs "
            << detail::fmt(first_failure->rhs) << " rel " << detail::fmt(first_failure->rel_error)
            << "\n";
        return kExitIdentityFailure;
    }
    return kExitOk;
}

/// Times series_solve against neumann_solve over repeated runs and writes
/// bench.json. Timings are inherently non-deterministic.
inline int cmd_bench(const std::filesystem::path& spec_path, int trials, const CommandOptions& opt,
                     std::ostream& log, std::ostream& err) {
    using Clock = std::chrono::steady_clock;
    try {
        if (trials < 1) {
            throw Error(ErrorCode::InvalidArgument, "--trials must be at least 1");
        }
        const ProblemSpec spec = load_problem_spec(spec_path);
        if (spec.kind != ProblemKind::Ode) {
            throw Error(ErrorCode::InvalidArgument, "bench needs an ode spec");
        }
        const auto a = spec.coefficient.build(spec.horizon);
        const GridFunction b = ode_forcing(spec);
        double best_series = 1e300;
        double best_neumann = 1e300;
        StageTimings stages;
        for (int t = 0; t < trials; ++t) {
            auto start = Clock::now();
            const SolveReport s = series_solve(a, b, spec.beta, spec.truncation, SolveOptions{false});
            const double ts = std::chrono::duration<double>(Clock::now() - start).count();
            if (ts < best_series) {
                best_series = ts;
                stages = s.timings;
            }
            start = Clock::now();
            const NeumannResult n =
                neumann_solve(a, b, spec.beta, spec.verify.neumann_k_max, spec.verify.neumann_tol);
            best_neumann =
                std::min(best_neumann, std::chrono::duration<double>(Clock::now() - start).count());
            (void)n;
        }
        log << "threads: " << thread_count() << "\n"
            << "series_solve best of " << trials << ": " << detail::fmt(best_series) << " s\n"
            << "neumann_solve best of " << trials << ": " << detail::fmt(best_neumann) << " s\n";
        const nlohmann::json doc{{"trials", trials},
                                 {"threads", thread_count()},
                                 {"points", spec.points},
                                 {"series_seconds", best_series},
                                 {"neumann_seconds", best_neumann},
                                 {"series_stages", io::timings_json(stages)}};
        io::write_atomic(opt.out_dir / "bench.json", io::dump(doc));
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << spec_path.string() << ": " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace fracrep::cli
