#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "collapse/commands.hpp"
#include "collapse/distributions.hpp"
#include "collapse/version.hpp"

namespace {

int default_workers() {
    if (const char* env = std::getenv("COLLAPSE_SIM_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void print_manifest(const collapse::RunManifest& manifest) {
    std::cout << "wrote " << manifest.artifacts.size() << " files to "
              << manifest.output_dir << ":\n";
    for (const std::string& a : manifest.artifacts) std::cout << "  " << a << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-collapse simulator and diversity toolkit"};
    app.set_version_flag("--version", std::string(collapse::kToolVersion));
    app.require_subcommand(1);

    // run
    std::string run_config;
    std::string run_out;
    std::optional<std::uint64_t> run_seed;
    CLI::App* run = app.add_subcommand("run", "execute one simulation run");
    run->add_option("--config", run_config, "config JSON (or metadata.json of a past run)")
        ->required();
    run->add_option("--out", run_out, "output directory")->required();
    run->add_option("--seed", run_seed, "override the config seed");

    // sweep
    std::string sweep_file;
    std::string sweep_out;
    int sweep_workers = default_workers();
    std::optional<std::uint64_t> sweep_seed;
    CLI::App* sweep = app.add_subcommand("sweep", "execute a parameter sweep");
    sweep->add_option("--sweep", sweep_file, "sweep JSON (or metadata.json of a past sweep)")
        ->required();
    sweep->add_option("--out", sweep_out, "output directory")->required();
    sweep->add_option("--workers", sweep_workers, "worker thread count");
    sweep->add_option("--seed", sweep_seed, "override the sweep base seed");

    // plot
    collapse::PlotArgs plot_args;
    std::string plot_kind = "kde-overlay";
    std::string plot_metadata;
    CLI::App* plot = app.add_subcommand("plot", "render an SVG figure from CSV inputs");
    plot->add_option("--kind", plot_kind, "kde-overlay or distance-lines");
    plot->add_option("--inputs", plot_args.inputs, "input CSV files");
    plot->add_option("--out", plot_args.out_dir, "output directory")->required();
    plot->add_option("--name", plot_args.name, "output SVG filename");
    plot->add_option("--title", plot_args.title, "figure title");
    plot->add_option("--x", plot_args.x_axis, "x-axis column (distance-lines)");
    plot->add_option("--series", plot_args.series_axis, "series column (distance-lines)");
    plot->add_option("--y", plot_args.y_column, "y column (default mean_hellinger)");
    plot->add_flag("--logx", plot_args.log_x, "logarithmic x axis");
    plot->add_option("--config", plot_metadata, "re-run from a plot metadata.json");

    // diversity
    collapse::DiversityArgs div_args;
    std::string div_metric = "euclidean";
    std::string div_metadata;
    CLI::App* diversity =
        app.add_subcommand("diversity", "indices and representativeness reports");
    diversity->add_option("--mentions", div_args.mentions_path, "mentions CSV");
    diversity->add_option("--reference", div_args.reference_path, "reference entity CSV");
    diversity->add_option("--mention-vectors", div_args.mention_vectors_path,
                          "mention embedding CSV");
    diversity->add_option("--reference-vectors", div_args.reference_vectors_path,
                          "reference embedding CSV");
    diversity->add_option("--weights", div_args.weights_path, "entity weight CSV");
    diversity->add_option("--groups", div_args.group_map_path, "entity-to-group CSV");
    diversity->add_option("--group-weights", div_args.group_weights_path,
                          "group weight CSV");
    diversity->add_option("--eps", div_args.eps, "resolution distance cutoff");
    diversity->add_option("--metric", div_metric, "euclidean or cosine");
    diversity->add_option("--out", div_args.out_dir, "output directory")->required();
    diversity->add_option("--config", div_metadata, "re-run from a diversity metadata.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            print_manifest(collapse::cmd_run(run_config, run_out, run_seed));
        } else if (sweep->parsed()) {
            print_manifest(collapse::cmd_sweep(sweep_file, sweep_out, sweep_workers,
                                               sweep_seed));
        } else if (plot->parsed()) {
            if (!plot_metadata.empty()) {
                collapse::PlotArgs loaded = collapse::plot_args_from_metadata(plot_metadata);
                loaded.out_dir = plot_args.out_dir;
                plot_args = loaded;
            } else if (plot_kind == "kde-overlay") {
                plot_args.kind = collapse::FigureKind::KdeOverlay;
            } else if (plot_kind == "distance-lines") {
                plot_args.kind = collapse::FigureKind::DistanceLines;
            } else {
                throw collapse::UsageError("unknown figure kind \"" + plot_kind
                                           + "\" (want kde-overlay or distance-lines)");
            }
            print_manifest(collapse::cmd_plot(plot_args));
        } else if (diversity->parsed()) {
            if (!div_metadata.empty()) {
                collapse::DiversityArgs loaded =
                    collapse::diversity_args_from_metadata(div_metadata);
                loaded.out_dir = div_args.out_dir;
                div_args = loaded;
            } else if (div_metric == "euclidean") {
                div_args.metric = collapse::DistanceMetric::Euclidean;
            } else if (div_metric == "cosine") {
                div_args.metric = collapse::DistanceMetric::Cosine;
            } else {
                throw collapse::UsageError("unknown metric \"" + div_metric + "\"");
            }
            print_manifest(collapse::cmd_diversity(div_args));
        }
    } catch (const collapse::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const collapse::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
