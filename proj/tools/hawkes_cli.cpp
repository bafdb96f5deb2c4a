#include "hawkes/commands.hpp"
#include "hawkes/config.hpp"
#include "hawkes/errors.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
    using namespace hawkes;
    CLI::App app{"Hawkes jump-diffusion toolkit: kernel fitting, simulation, assumption checks, "
                 "kernel-convergence studies and the log-utility portfolio example."};
    app.footer("Exit codes: 0 ok, 1 config or usage error, 2 assumption fail, 3 assumption unknown, "
               "4 domination violation.\n\n" + config_reference());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    auto* config_opt = app.add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides [run] out)");
    auto* seed_opt = app.add_option("--seed", seed, "base seed (overrides [driver] seed and [portfolio] seed)");
    auto* threads_opt =
        app.add_option("--threads", threads, "worker threads (overrides [run] threads)")->check(CLI::PositiveNumber);
    static_cast<void>(config_opt);

    const std::map<std::string, std::pair<std::string, std::function<int(const Config&, const Overrides&, std::ostream&)>>>
        commands = {
            {"fit-kernel", {"fit exponential ladders; writes fit.csv and kernel_curves.csv", cmd_fit}},
            {"simulate", {"simulate one path per kernel on a shared driver; writes path_*.csv, jumps_*.csv", cmd_simulate}},
            {"check", {"sampled assumption report; exit 0 pass, 2 fail, 3 unknown", cmd_check}},
            {"converge", {"coupled kernel-convergence study; writes convergence.csv", cmd_converge}},
            {"portfolio", {"closed-form and simulated log-utility values; writes portfolio.csv", cmd_portfolio}},
        };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_codes::ok : exit_codes::usage;
    }

    try {
        const Config cfg = Config::load(config_path);
        Overrides ov;
        if (*out_opt) ov.out_dir = out_dir;
        if (*seed_opt) ov.seed = seed;
        if (*threads_opt) ov.threads = threads;
        const std::string name = app.get_subcommands().front()->get_name();
        return commands.at(name).second(cfg, ov, std::cout);
    } catch (const DominationViolated& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_codes::domination;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_codes::usage;
    }
}
