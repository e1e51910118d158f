#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "heun_gamma/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Gamma-series solutions of the confluent Heun equations", "heun-gamma"};
    std::string command, config, out_dir = ".";
    int n = -1;
    double tol = -1.0;
    app.add_option("command", command, "solve | verify | terminate | reductions | special")
        ->required()
        ->check(CLI::IsMember({"solve", "verify", "terminate", "reductions", "special"}));
    app.add_option("--config", config, "JSON job configuration")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--n", n, "truncation order (overrides N)");
    app.add_option("--tol", tol, "tolerance (overrides the configuration)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: ParseError: %s\n", e.what());
        return 1;
    }

    try {
        heun::cli::JobConfig cfg = heun::cli::parse_config(heun::cli::read_file(config));
        const auto cmd = heun::cli::command_from(command);
        if (n >= 0) {
            if (cmd == heun::cli::Command::Terminate)
                cfg.termination_N = static_cast<std::size_t>(n);
            else
                cfg.N = static_cast<std::size_t>(n);
        }
        if (tol > 0.0) cfg.tolerance = tol;
        heun::cli::validate(cfg);
        return heun::cli::run(cmd, cfg, out_dir);
    } catch (const heun::Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.kind().c_str(), e.what());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: InternalError: %s\n", e.what());
    }
    return 1;
}
