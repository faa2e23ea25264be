// collective - command line front end.
//
//   collective run <config>      write trajectory, comb and spectrum files
//   collective verify <config>   JSON invariant report, exit 1 on any failure
//   collective figure1 <dir>     scaled Ohmic S and S^(2) curves
//
// Exit codes: 0 success, 1 failed verification, 2 bad config or arguments,
// 3 numerical or I/O failure.

#include "collective/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

enum Exit { ok = 0, failed_checks = 1, bad_config = 2, module_error = 3 };

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective-coordinate damping and spectra for two coupled harmonic chains"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    std::string output;
    bool quiet = false;
    app.add_option("--output", output, "Output directory (overrides the config)");
    app.add_flag("--quiet", quiet, "Suppress console output");

    std::string run_config, verify_config, figure_dir;
    auto* run = app.add_subcommand("run", "Run a scenario and write data files");
    run->add_option("config", run_config, "Config file")->required();
    auto* verify = app.add_subcommand("verify", "Check module invariants on a scenario");
    verify->add_option("config", verify_config, "Config file")->required();
    auto* figure = app.add_subcommand("figure1", "Write the scaled Ohmic spectra");
    figure->add_option("directory", figure_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_config;
    }

    try {
        if (run->parsed()) {
            auto config = collective::load_config(run_config);
            const auto dir = output.empty() ? config.output.directory : std::filesystem::path(output);
            const auto summary = collective::run_scenario(config, dir);
            if (!quiet) {
                std::cout << "wrote " << dir.string() << ": regime " << summary["regime"].get<std::string>()
                          << ", Omega0^2 = " << collective::format_number(summary["omega0_sq"].get<double>())
                          << ", gamma0 = " << collective::format_number(summary["gamma0"].get<double>()) << '\n';
                for (const auto& w : summary["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
            }
            return ok;
        }
        if (verify->parsed()) {
            const auto report = collective::verify_scenario(collective::load_config(verify_config));
            if (!quiet) std::cout << report.to_json().dump(2) << '\n';
            return report.all_passed() ? ok : failed_checks;
        }
        const auto dir = output.empty() ? std::filesystem::path(figure_dir) : std::filesystem::path(output);
        const auto r = collective::write_figure1(dir);
        if (!quiet) {
            std::cout << "wrote " << r.s1_file.string() << " (peak " << r.s1_peak << ") and "
                      << r.s2_file.string() << " (peak " << r.s2_peak << ")\n";
        }
        return ok;
    } catch (const collective::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bad_config;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return module_error;
    }
}
