// Command-line front end.
#include <CLI11.hpp>
#include <iostream>

#include "liepnm/cli.hpp"

int main(int argc, char** argv) {
    using namespace liepnm::cli;

    CLI::App app{"Bayesian solver for ODEs with solvable Lie symmetry"};
    app.require_subcommand(1);

    std::string config;
    auto* solve = app.add_subcommand("solve", "Sample the posterior and write ensemble CSVs");
    solve->add_option("config", config, "key = value config file")->required();

    std::string family, F;
    auto* verify = app.add_subcommand("verify-symmetry", "Check the built-in generators of a family");
    verify->add_option("--family", family, "first_order or second_order")->required();
    verify->add_option("--F", F, "F(r) for first_order (default 1/r + r)");

    SampleTmgOptions tmg;
    auto* sample = app.add_subcommand("sample-tmg", "Sample a truncated standard Gaussian");
    sample->add_option("--dims", tmg.dims, "dimension")->required();
    sample->add_option("--constraints", tmg.constraints, "rows f_1,...,f_dims,g meaning f.z + g >= 0")->required();
    sample->add_option("--count", tmg.count, "retained samples");
    sample->add_option("--seed", tmg.seed, "RNG seed");
    sample->add_option("--burn-in", tmg.burn_in, "discarded steps");
    sample->add_option("--travel-time", tmg.travel_time, "HMC travel time per step");
    sample->add_option("--out", tmg.output, "samples CSV");

    std::string ensemble, svg, plot_config;
    auto* plot = app.add_subcommand("export-plot", "Render an ensemble CSV as SVG");
    plot->add_option("ensemble", ensemble, "ensemble_xy.csv or ensemble_rs.csv")->required();
    plot->add_option("svg", svg, "output SVG")->required();
    plot->add_option("--config", plot_config, "config used to draw the envelope");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    if (*solve) return cmd_solve(config, std::cout, std::cerr);
    if (*verify) return cmd_verify_symmetry(family, F, std::cout, std::cerr);
    if (*sample) return cmd_sample_tmg(tmg, std::cout, std::cerr);
    if (*plot) {
        std::optional<std::filesystem::path> cfg;
        if (!plot_config.empty()) cfg = plot_config;
        return cmd_export_plot(ensemble, svg, cfg, std::cout, std::cerr);
    }
    return kUsage;
}
