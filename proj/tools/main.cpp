// Batch front door: config-driven pipeline runs with deterministic outputs.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 IO failure.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "specinv/commands.hpp"
#include "specinv/errors.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    CLI::App app{"Inverse spectral reconstruction toolkit for semiclassical "
                 "radial potentials"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "specinv-out";
    std::string spectra_dir;

    auto add_common = [&](CLI::App* cmd, bool with_spectra) {
        cmd->add_option("--config", config_path, "JSON run configuration")
            ->required();
        cmd->add_option("--out", out_dir, "output directory");
        if (with_spectra)
            cmd->add_option("--spectra", spectra_dir,
                            "spectra directory (default <out>/spectra)");
    };

    CLI::App* forward = app.add_subcommand("forward", "generate spectra");
    CLI::App* oracle = app.add_subcommand("oracle", "quadrature oracle curves");
    CLI::App* extract = app.add_subcommand("extract", "trace-invariant curves");
    CLI::App* invert = app.add_subcommand("invert", "Abel inversion to v, I1, I2");
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "profile recovery and report");
    CLI::App* diagnose = app.add_subcommand("diagnose", "radiality diagnostics");
    CLI::App* flowlines = app.add_subcommand("flowlines", "gradient flowlines");
    add_common(forward, false);
    add_common(oracle, false);
    add_common(extract, true);
    add_common(invert, false);
    add_common(reconstruct, false);
    add_common(diagnose, false);
    add_common(flowlines, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) // --help
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        specinv::RunConfig cfg = specinv::load_config(config_path);
        fs::path out(out_dir);
        if (forward->parsed())
            return specinv::cmd_forward(cfg, out);
        if (oracle->parsed())
            return specinv::cmd_oracle(cfg, out);
        if (extract->parsed()) {
            fs::path sdir = spectra_dir.empty() ? out / "spectra" : fs::path(spectra_dir);
            return specinv::cmd_extract(cfg, sdir, out);
        }
        if (invert->parsed())
            return specinv::cmd_invert(cfg, out);
        if (reconstruct->parsed())
            return specinv::cmd_reconstruct(cfg, out);
        if (diagnose->parsed())
            return specinv::cmd_diagnose(cfg, out);
        if (flowlines->parsed())
            return specinv::cmd_flowlines(cfg, out);
    } catch (const specinv::config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const specinv::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const specinv::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
