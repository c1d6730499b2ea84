// Command-line front end: fracrep {solve,verify,identity,bench}.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "fracrep/commands.hpp"
#include "fracrep/parallel.hpp"

namespace {

// --threads wins; FRACREP_THREADS is the fallback; 0 means the runtime default.
int resolve_threads(std::optional<int> flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("FRACREP_THREADS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring FRACREP_THREADS='" << env << "'\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Caputo fractional ODE/PDE solver built on the single-integral series representation"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::optional<int> threads;
    int trials = 100;
    std::optional<int> forced_a;
    bool timings = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
        cmd->add_option("--seed", seed, "Seed for all randomness (logged)")->capture_default_str();
        cmd->add_option("--threads", threads, "Worker threads, 0 = auto (fallback: FRACREP_THREADS)")
            ->check(CLI::NonNegativeNumber);
    };

    auto* solve = app.add_subcommand("solve", "Solve the problem described by a spec file");
    solve->add_option("--spec", spec_path, "Problem spec (JSON)")->required();
    solve->add_flag("--timings", timings, "Also write per-stage wall-clock timings.json");
    add_common(solve);

    auto* verify = app.add_subcommand("verify", "Compare series_solve against the Neumann series");
    verify->add_option("--spec", spec_path, "Problem spec (JSON, kind ode)")->required();
    add_common(verify);

    auto* identity = app.add_subcommand("identity", "Randomized checks of the summation identities");
    identity->add_option("--trials", trials, "Number of randomized trials")->capture_default_str();
    identity->add_option("--force-a", forced_a, "Force the terminating Gauss case with this integer a");
    add_common(identity);

    auto* bench = app.add_subcommand("bench", "Time series_solve against neumann_solve");
    bench->add_option("--spec", spec_path, "Problem spec (JSON, kind ode)")->required();
    bench->add_option("--trials", trials, "Repetitions (best time reported)")->capture_default_str();
    add_common(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : fracrep::cli::kExitError;
    }

    fracrep::set_thread_count(resolve_threads(threads));
    fracrep::cli::CommandOptions opt;
    opt.out_dir = out_dir;
    opt.seed = seed;
    opt.write_timings = timings;

    if (solve->parsed()) {
        return fracrep::cli::cmd_solve(spec_path, opt, std::cout, std::cerr);
    }
    if (verify->parsed()) {
        return fracrep::cli::cmd_verify(spec_path, opt, std::cout, std::cerr);
    }
    if (identity->parsed()) {
        return fracrep::cli::cmd_identity(seed, trials, forced_a, std::cout, std::cerr);
    }
    return fracrep::cli::cmd_bench(spec_path, trials, opt, std::cout, std::cerr);
}
