#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "collapse/diversity.hpp"

namespace collapse {

// What a command produced. The persisted metadata JSON echoes the full
// resolved inputs, so any command can be re-run from it alone.
struct RunManifest {
    std::string output_dir;
    std::string input_path;
    std::vector<std::string> artifacts;  // filenames relative to output_dir
    std::string tool_version;
    std::string timestamp;
};

RunManifest cmd_run(const std::string& config_path, const std::string& out_dir,
                    std::optional<std::uint64_t> seed_override = std::nullopt);

RunManifest cmd_sweep(const std::string& sweep_path, const std::string& out_dir, int workers,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

enum class FigureKind { KdeOverlay, DistanceLines };

struct PlotArgs {
    FigureKind kind = FigureKind::KdeOverlay;
    std::vector<std::string> inputs;
    std::string out_dir;
    std::string name = "figure.svg";
    std::string title;
    // distance-lines column selection
    std::string x_axis;
    std::string series_axis;
    std::string y_column = "mean_hellinger";
    bool log_x = false;
};

RunManifest cmd_plot(const PlotArgs& args);

// Loads PlotArgs back from a plot metadata JSON (re-run support).
PlotArgs plot_args_from_metadata(const std::string& path);

struct DiversityArgs {
    std::string mentions_path;
    std::string reference_path;
    std::string mention_vectors_path;    // optional
    std::string reference_vectors_path;  // optional
    std::string weights_path;            // optional
    std::string group_map_path;          // optional
    std::string group_weights_path;      // optional
    double eps = 3.0;
    DistanceMetric metric = DistanceMetric::Euclidean;
    std::string out_dir;
};

RunManifest cmd_diversity(const DiversityArgs& args);

DiversityArgs diversity_args_from_metadata(const std::string& path);

}  // namespace collapse
