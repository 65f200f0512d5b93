// bqd: run quality-diversity experiments on the analytic suites.
//
//   bqd list
//   bqd validate <config.json>
//   bqd run <config.json> [--out DIR] [--threads N] [--seed N]

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <bqd/bqd.hpp>

namespace {

    constexpr int exit_ok = 0;
    constexpr int exit_runtime = 1;
    constexpr int exit_config = 2;

    int cmd_list()
    {
        for (const auto& name : bqd::suite_names()) {
            const auto p = bqd::make_suite(name);
            std::cout << name << ' ' << p.space.dim_continuous() << ' ' << p.space.dim_levels() << ' ' << p.n_features << ' '
                      << p.n_constraints << ' ' << p.grid.total_bins() << '\n';
        }
        return exit_ok;
    }

    std::optional<bqd::RunConfig> load(const std::string& path)
    {
        try {
            return bqd::load_run_config(path);
        }
        catch (const bqd::ConfigError& e) {
            std::cerr << "invalid config " << path << ": " << e.what() << '\n';
            return std::nullopt;
        }
    }

    int cmd_validate(const std::string& path)
    {
        auto cfg = load(path);
        if (!cfg)
            return exit_config;
        std::cout << path << ": " << cfg->experiments.size() << " experiment(s) OK\n";
        return exit_ok;
    }

    int cmd_run(const std::string& path, const std::string& out_override, unsigned threads, std::optional<std::uint64_t> seed)
    {
        auto cfg = load(path);
        if (!cfg)
            return exit_config;
        const std::filesystem::path out = out_override.empty() ? std::filesystem::path(cfg->output_dir) : std::filesystem::path(out_override);
        try {
            std::filesystem::create_directories(out);
            for (auto spec : cfg->experiments) {
                if (seed)
                    spec.base_seed = *seed;
                const auto series = bqd::run_experiment(spec, threads);
                const std::string stem = spec.suite + "_" + bqd::to_string(spec.algorithm);

                std::ostringstream runs, agg;
                bqd::write_runs_csv(runs, series);
                bqd::write_aggregate_csv(agg, series);
                bqd::write_file_atomic(out / (stem + "_runs.csv"), runs.str());
                bqd::write_file_atomic(out / (stem + "_aggregate.csv"), agg.str());
                for (const auto& r : series.runs)
                    bqd::write_file_atomic(out / (stem + "_rep" + std::to_string(r.repetition) + "_archive.json"),
                        bqd::to_json(r.archive).dump(2) + "\n");

                const auto& last = series.aggregate.back();
                std::cout << bqd::to_string(spec.algorithm) << ' ' << spec.suite << " evals=" << last.evals
                          << " median_qd=" << bqd::format_number(last.median_qd)
                          << " median_niches=" << bqd::format_number(last.median_niches) << '\n';
            }
        }
        catch (const std::exception& e) {
            std::cerr << "run failed: " << e.what() << '\n';
            return exit_runtime;
        }
        return exit_ok;
    }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bayesian quality-diversity experiments on mixed-variable benchmarks"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List benchmark suites: name d_c d_q n n_g bins");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a run configuration without running it");
    validate->add_option("config", validate_path, "JSON run configuration")->required();

    std::string run_path, out_dir;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Run every experiment of a configuration");
    run->add_option("config", run_path, "JSON run configuration")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("--threads", threads, "Maximum parallel repetitions (0: all cores)");
    run->add_option("--seed", seed, "Override base_seed of every experiment");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_config;
    }

    if (*list)
        return cmd_list();
    if (*validate)
        return cmd_validate(validate_path);
    return cmd_run(run_path, out_dir, threads, seed);
}
