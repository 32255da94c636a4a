// nhscatter: batch front door for bilinear (conjugation-free) one-dimensional
// scattering off complex potentials.
//
//   nhscatter scatter --config cfg.json --energy 1.0
//   nhscatter scan    --config cfg.json [--output out.csv] [--format csv|json]
//   nhscatter evolve  --config cfg.json
//   nhscatter verify  [--seed 0]
//
// Exit codes: 0 ok, 1 verify failure, 2 config error, 3 spectral singularity
// encountered, 4 numerical failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nhqs/nhqs.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string output_path;
    std::string format;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration")->required();
    cmd->add_option("--output", args.output_path, "output path (overrides config)");
    cmd->add_option("--format", args.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--quiet", args.quiet, "suppress informational messages");
}

nhqs::RunConfig load(const CommonArgs& args) {
    nhqs::RunConfig rc = nhqs::load_config_file(args.config_path);
    if (!args.output_path.empty()) rc.output.path = args.output_path;
    if (args.format == "csv") rc.output.format = nhqs::OutputFormat::Csv;
    if (args.format == "json") rc.output.format = nhqs::OutputFormat::Json;
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bilinear non-Hermitian 1D scattering toolkit"};
    app.require_subcommand(1);

    CommonArgs scatter_args, scan_args, evolve_args;
    double energy = 0.0;
    std::uint64_t seed = 0;
    bool verify_quiet = false;

    CLI::App* scatter = app.add_subcommand("scatter", "S-matrix and coefficients at one energy");
    add_common(scatter, scatter_args);
    scatter->add_option("--energy", energy, "real energy E > 0")->required();

    CLI::App* scan = app.add_subcommand("scan", "coefficient table over an energy grid");
    add_common(scan, scan_args);

    CLI::App* evolve = app.add_subcommand("evolve", "co-evolve the dual field pair");
    add_common(evolve, evolve_args);

    CLI::App* verify = app.add_subcommand("verify", "run the seeded invariant suites");
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_flag("--quiet", verify_quiet, "suppress informational messages");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scatter->parsed())
            return nhqs::cmd_scatter(load(scatter_args), energy, std::cout, std::cerr,
                                     scatter_args.quiet);
        if (scan->parsed())
            return nhqs::cmd_scan(load(scan_args), std::cout, std::cerr, scan_args.quiet);
        if (evolve->parsed())
            return nhqs::cmd_evolve(load(evolve_args), std::cout, std::cerr, evolve_args.quiet);
        if (verify->parsed()) {
            (void)verify_quiet;
            return nhqs::cmd_verify(seed, std::cout);
        }
    } catch (const nhqs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return nhqs::exit_code::config_error;
    } catch (const nhqs::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return nhqs::exit_code::config_error;
    } catch (const nhqs::SpectralSingularity& e) {
        std::cerr << "spectral singularity: " << e.what() << "\n";
        return nhqs::exit_code::spectral_singularity;
    } catch (const nhqs::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return nhqs::exit_code::numerical_failure;
    }
    return nhqs::exit_code::ok;
}
