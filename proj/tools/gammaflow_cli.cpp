#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gammaflow/config.hpp"
#include "gammaflow/errors.hpp"
#include "gammaflow/harness.hpp"
#include "gammaflow/paths.hpp"
#include "gammaflow/report.hpp"

namespace gf = gammaflow;

namespace {

struct OutputOptions {
    std::string out;
    std::string format;
    bool pretty = false;
    int workers = 0;
    bool timing = false;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--out", o.out, "Report file (default: standard output)");
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--pretty", o.pretty, "Print an aligned table to standard output");
    cmd->add_option("--workers", o.workers, "OpenMP worker count (0: runtime default)")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--timing", o.timing, "Record wall-clock time per experiment (reports stop being reproducible)");
}

int emit(const std::vector<gf::RatioReport>& rows, const OutputOptions& o) {
    const auto format = gf::parse_report_format(o.format.empty() ? "csv" : o.format);
    if (!o.out.empty())
        gf::write_report(rows, format, o.out);
    else if (!o.pretty)
        gf::write_report(rows, format, std::cout);
    if (o.pretty) gf::write_pretty(rows, std::cout);
    return gf::all_pass(rows) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo and exact checks for stochastic integration in Banach spaces"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List the experiment catalog");

    OutputOptions run_out;
    std::string experiment, config_file, bundle_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths, depth;
    auto* run = app.add_subcommand("run", "Run one experiment");
    run->add_option("experiment", experiment, "Catalog name (overrides the config file)");
    run->add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Seed");
    run->add_option("--paths", paths, "Number of sample paths M")->check(CLI::PositiveNumber);
    run->add_option("--depth", depth, "Sign-tree depth for the exact oracle")->check(CLI::PositiveNumber);
    run->add_option("--bundle", bundle_file, "Use a saved path bundle instead of sampling")->check(CLI::ExistingFile);
    add_output_options(run, run_out);

    OutputOptions suite_out;
    std::uint64_t suite_seed = 7;
    std::optional<std::size_t> suite_paths;
    auto* suite = app.add_subcommand("suite", "Run every experiment with the acceptance settings");
    suite->add_option("--seed", suite_seed, "Seed");
    suite->add_option("--paths", suite_paths, "Override M in every entry")->check(CLI::PositiveNumber);
    add_output_options(suite, suite_out);

    std::string sample_config, sample_out;
    std::optional<std::uint64_t> sample_seed;
    std::optional<std::size_t> sample_paths;
    auto* sample = app.add_subcommand("sample", "Sample a path bundle and save it");
    sample->add_option("--config", sample_config, "JSON config file")->check(CLI::ExistingFile);
    sample->add_option("--seed", sample_seed, "Seed");
    sample->add_option("--paths", sample_paths, "Number of sample paths M")->check(CLI::PositiveNumber);
    sample->add_option("--out", sample_out, "Bundle file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*list) {
            for (const auto& e : gf::catalog())
                std::cout << e.name << "\n  result:    " << e.anchor << "\n  compares:  " << e.summary
                          << "\n  passes if: " << e.predicate << "\n";
            return 0;
        }
        if (*run) {
            gf::ExperimentConfig cfg = config_file.empty() ? gf::ExperimentConfig{} : gf::load_config(config_file);
            if (!experiment.empty()) cfg.experiment = experiment;
            if (seed) cfg.seed = *seed;
            if (paths) cfg.paths = *paths;
            if (depth) cfg.depth = *depth;
            if (run_out.timing) cfg.timing = true;
            if (run_out.out.empty()) run_out.out = cfg.out;
            if (run_out.format.empty()) run_out.format = cfg.format;
            for (const auto& w : gf::validate_config(cfg)) std::cerr << "warning: " << w << '\n';
            gf::set_workers(run_out.workers);
            std::optional<gf::PathBundle> bundle;
            if (!bundle_file.empty()) bundle = gf::load_bundle(bundle_file, cfg.horizon);
            const auto rows = gf::run_experiment(cfg, gf::Exec::parallel, bundle ? &*bundle : nullptr);
            return emit(rows, run_out);
        }
        if (*suite) {
            gf::set_workers(suite_out.workers);
            const auto rows = gf::run_suite(suite_seed, gf::Exec::parallel, suite_paths, suite_out.timing);
            return emit(rows, suite_out);
        }
        if (*sample) {
            gf::ExperimentConfig cfg = sample_config.empty() ? gf::ExperimentConfig{} : gf::load_config(sample_config);
            if (sample_seed) cfg.seed = *sample_seed;
            if (sample_paths) cfg.paths = *sample_paths;
            gf::validate_config(cfg);
            const auto b = gf::sample_paths(cfg.grid(), cfg.d_h, cfg.paths, cfg.seed, cfg.mode, cfg.normal_method);
            gf::save_bundle(b, sample_out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
