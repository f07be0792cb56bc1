#include "collapse/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "collapse/csv.hpp"
#include "collapse/io.hpp"
#include "collapse/svg.hpp"
#include "collapse/version.hpp"

namespace collapse {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Honors SOURCE_DATE_EPOCH so runs can be made byte-reproducible end to end.
std::string make_timestamp() {
    std::time_t t;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void ensure_out_dir(const std::string& out_dir) {
    if (out_dir.empty()) throw UsageError("output directory must not be empty");
    fs::create_directories(out_dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

// Unwraps a previously written metadata envelope, if that is what the
// file holds; otherwise returns the document unchanged.
json load_command_input(const std::string& path, const std::string& command,
                        const std::string& payload_key) {
    json j = parse_json_file(path);
    if (j.is_object() && j.contains("tool") && j.value("tool", "") == kToolName) {
        const std::string cmd = j.value("command", "");
        if (cmd != command)
            throw ConfigError(path + " is metadata for command \"" + cmd
                              + "\", expected \"" + command + "\"");
        if (!j.contains(payload_key))
            throw ConfigError(path + " metadata lacks \"" + payload_key + "\"");
        return j.at(payload_key);
    }
    return j;
}

RunManifest write_metadata(const std::string& out_dir, const std::string& input_path,
                           const std::string& command, const std::string& payload_key,
                           const json& payload, std::vector<std::string> artifacts) {
    artifacts.push_back("metadata.json");
    RunManifest manifest{out_dir, input_path, artifacts, kToolVersion, make_timestamp()};
    json meta;
    meta["tool"] = kToolName;
    meta["version"] = kToolVersion;
    meta["command"] = command;
    meta["timestamp"] = manifest.timestamp;
    meta[payload_key] = payload;
    meta["outputs"] = artifacts;
    write_text_file(join_path(out_dir, "metadata.json"), meta.dump(2) + "\n");
    return manifest;
}

std::string sanitize_for_filename(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')
            out.push_back(c);
        else
            out.push_back('_');
    }
    return out.empty() ? std::string("_") : out;
}

std::string format_2dp(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// ---- diversity input loading ----

std::vector<std::string> read_label_column(const std::string& path) {
    const CsvTable table = read_csv_file(path);
    const int col = table.column("label");
    if (col < 0) throw UsageError(path + ": missing column \"label\"");
    std::vector<std::string> labels;
    labels.reserve(table.rows.size());
    for (const auto& row : table.rows) labels.push_back(row[static_cast<std::size_t>(col)]);
    return labels;
}

VectorSet read_vectors(const std::string& path) {
    const CsvTable table = read_csv_file(path);
    const int label_col = table.column("label");
    if (label_col < 0) throw UsageError(path + ": missing column \"label\"");
    const int dim = static_cast<int>(table.header.size()) - 1;
    if (dim < 1) throw UsageError(path + ": no vector components");
    VectorSet set;
    set.dimension = dim;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        LabeledVector v;
        v.label = table.rows[r][static_cast<std::size_t>(label_col)];
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (static_cast<int>(c) == label_col) continue;
            try {
                v.values.push_back(std::stod(table.rows[r][c]));
            } catch (const std::exception&) {
                throw UsageError(path + " row " + std::to_string(r + 2)
                                 + ": non-numeric vector component");
            }
        }
        set.vectors.push_back(std::move(v));
    }
    validate(set);
    return set;
}

std::map<std::string, double> read_weights(const std::string& path,
                                           const std::string& key_column) {
    const CsvTable table = read_csv_file(path);
    const int key_col = table.column(key_column);
    const int weight_col = table.column("weight");
    if (key_col < 0) throw UsageError(path + ": missing column \"" + key_column + "\"");
    if (weight_col < 0) throw UsageError(path + ": missing column \"weight\"");
    std::map<std::string, double> weights;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        try {
            weights[table.rows[r][static_cast<std::size_t>(key_col)]] =
                std::stod(table.rows[r][static_cast<std::size_t>(weight_col)]);
        } catch (const std::exception&) {
            throw UsageError(path + " row " + std::to_string(r + 2) + ": non-numeric weight");
        }
    }
    return weights;
}

}  // namespace

RunManifest cmd_run(const std::string& config_path, const std::string& out_dir,
                    std::optional<std::uint64_t> seed_override) {
    SimConfig config = sim_config_from_json(load_command_input(config_path, "run", "config"));
    if (seed_override) config.seed = *seed_override;
    ensure_out_dir(out_dir);

    const SimResult result = run_simulation(config);
    write_text_file(join_path(out_dir, "rounds.csv"), rounds_csv(result));
    write_text_file(join_path(out_dir, "final_pdf.csv"), pdf_csv(result.final_public_pdf));
    return write_metadata(out_dir, config_path, "run", "config", to_json(config),
                          {"rounds.csv", "final_pdf.csv"});
}

RunManifest cmd_sweep(const std::string& sweep_path, const std::string& out_dir, int workers,
                      std::optional<std::uint64_t> seed_override) {
    SweepGrid grid = sweep_grid_from_json(load_command_input(sweep_path, "sweep", "sweep"));
    if (seed_override) grid.base_seed = *seed_override;
    ensure_out_dir(out_dir);

    const SweepResult result = run_sweep(grid, workers);

    std::vector<std::string> group_by;
    if (!grid.delta.empty()) group_by.push_back("delta");
    if (!grid.eta.empty()) group_by.push_back("eta");
    if (!grid.sigma_tr.empty()) group_by.push_back("sigma_tr");
    if (!grid.generation_period.empty()) group_by.push_back("generation_period");
    if (!grid.df.empty()) group_by.push_back("df");

    std::vector<std::string> artifacts{"runs.csv", "aggregate.csv"};
    write_text_file(join_path(out_dir, "runs.csv"), sweep_runs_csv(result));
    write_text_file(join_path(out_dir, "aggregate.csv"),
                    aggregate_csv(aggregate(result, group_by), group_by));

    if (grid.collect_final_pdfs) {
        // one density per cell: the pointwise mean over replications
        std::map<std::vector<std::string>, std::pair<GriddedPdf, int>> cells;
        std::vector<std::vector<std::string>> order;
        for (const RunOutcome& run : result.runs) {
            if (!run.final_pdf) continue;
            std::vector<std::string> key;
            for (const std::string& axis : group_by)
                key.push_back(axis + "-" + sanitize_for_filename(
                                              format_axis_value(axis, run.coords)));
            auto it = cells.find(key);
            if (it == cells.end()) {
                cells.emplace(key, std::make_pair(*run.final_pdf, 1));
                order.push_back(key);
            } else {
                for (std::size_t i = 0; i < it->second.first.densities.size(); ++i)
                    it->second.first.densities[i] += run.final_pdf->densities[i];
                ++it->second.second;
            }
        }
        for (const auto& key : order) {
            auto& [pdf, count] = cells.at(key);
            for (double& d : pdf.densities) d /= static_cast<double>(count);
            normalize(pdf);
            std::string name = "pdf";
            for (const std::string& part : key) name += "_" + part;
            name += ".csv";
            write_text_file(join_path(out_dir, name), pdf_csv(pdf));
            artifacts.push_back(name);
        }
        const GriddedPdf truth =
            eval_grid(TrueDistribution{grid.base.df, 0.0, 1.0}, grid.base.grid);
        write_text_file(join_path(out_dir, "truth_pdf.csv"), pdf_csv(truth));
        artifacts.push_back("truth_pdf.csv");
    }

    return write_metadata(out_dir, sweep_path, "sweep", "sweep", to_json(grid), artifacts);
}

RunManifest cmd_plot(const PlotArgs& args) {
    if (args.inputs.empty()) throw UsageError("plot requires at least one input CSV");
    ensure_out_dir(args.out_dir);

    std::vector<PlotSeries> series;
    PlotOptions options;
    options.title = args.title;

    if (args.kind == FigureKind::KdeOverlay) {
        options.x_label = "x";
        options.y_label = "density";
        for (const std::string& path : args.inputs) {
            const CsvTable table = read_csv_file(path);
            const int xc = table.column("x");
            const int dc = table.column("density");
            if (xc < 0) throw UsageError(path + ": missing column \"x\"");
            if (dc < 0) throw UsageError(path + ": missing column \"density\"");
            PlotSeries s;
            s.label = fs::path(path).stem().string();
            for (const auto& row : table.rows)
                s.points.emplace_back(std::stod(row[static_cast<std::size_t>(xc)]),
                                      std::stod(row[static_cast<std::size_t>(dc)]));
            series.push_back(std::move(s));
        }
    } else {
        if (args.x_axis.empty())
            throw UsageError("distance-lines requires --x naming the x-axis column");
        options.x_label = args.x_axis;
        options.y_label = args.y_column;
        options.log_x = args.log_x;
        options.markers = true;
        for (const std::string& path : args.inputs) {
            const CsvTable table = read_csv_file(path);
            const int xc = table.column(args.x_axis);
            const int yc = table.column(args.y_column);
            if (xc < 0) throw UsageError(path + ": missing column \"" + args.x_axis + "\"");
            if (yc < 0) throw UsageError(path + ": missing column \"" + args.y_column + "\"");
            int sc = -1;
            if (!args.series_axis.empty()) {
                sc = table.column(args.series_axis);
                if (sc < 0)
                    throw UsageError(path + ": missing column \"" + args.series_axis + "\"");
            }
            std::map<std::string, PlotSeries> by_series;
            std::vector<std::string> order;
            for (const auto& row : table.rows) {
                const std::string key =
                    sc < 0 ? std::string() : row[static_cast<std::size_t>(sc)];
                if (!by_series.count(key)) {
                    PlotSeries s;
                    s.label = sc < 0 ? fs::path(path).stem().string()
                                     : args.series_axis + "=" + key;
                    by_series.emplace(key, std::move(s));
                    order.push_back(key);
                }
                const std::string& x_raw = row[static_cast<std::size_t>(xc)];
                // "none" marks the no-turnover cell on a generation_period axis
                const double x = x_raw == "none" ? 0.0 : std::stod(x_raw);
                by_series[key].points.emplace_back(
                    x, std::stod(row[static_cast<std::size_t>(yc)]));
            }
            for (const std::string& key : order) series.push_back(std::move(by_series[key]));
        }
    }

    const std::string svg = render_line_chart(series, options);
    write_text_file(join_path(args.out_dir, args.name), svg);

    json payload;
    payload["kind"] = args.kind == FigureKind::KdeOverlay ? "kde-overlay" : "distance-lines";
    payload["inputs"] = args.inputs;
    payload["name"] = args.name;
    payload["title"] = args.title;
    payload["x_axis"] = args.x_axis;
    payload["series_axis"] = args.series_axis;
    payload["y_column"] = args.y_column;
    payload["log_x"] = args.log_x;
    return write_metadata(args.out_dir, args.inputs.front(), "plot", "args", payload,
                          {args.name});
}

PlotArgs plot_args_from_metadata(const std::string& path) {
    const json j = load_command_input(path, "plot", "args");
    PlotArgs args;
    const std::string kind = j.value("kind", "");
    if (kind == "kde-overlay") args.kind = FigureKind::KdeOverlay;
    else if (kind == "distance-lines") args.kind = FigureKind::DistanceLines;
    else throw ConfigError(path + ": unknown plot kind \"" + kind + "\"");
    args.inputs = j.value("inputs", std::vector<std::string>{});
    args.name = j.value("name", args.name);
    args.title = j.value("title", "");
    args.x_axis = j.value("x_axis", "");
    args.series_axis = j.value("series_axis", "");
    args.y_column = j.value("y_column", args.y_column);
    args.log_x = j.value("log_x", false);
    return args;
}

RunManifest cmd_diversity(const DiversityArgs& args) {
    if (args.mentions_path.empty() || args.reference_path.empty())
        throw UsageError("diversity requires --mentions and --reference");
    ensure_out_dir(args.out_dir);

    const std::vector<std::string> reference = read_label_column(args.reference_path);
    if (reference.empty()) throw UsageError(args.reference_path + ": no reference entities");
    const int R = static_cast<int>(reference.size());
    const std::set<std::string> reference_set(reference.begin(), reference.end());

    const CsvTable mentions = read_csv_file(args.mentions_path);
    const int mention_col = mentions.column("mention");
    if (mention_col < 0)
        throw UsageError(args.mentions_path + ": missing column \"mention\"");
    if (mentions.rows.empty()) throw UsageError(args.mentions_path + ": no mentions");
    const int model_col = mentions.column("model");
    const int prompt_col = mentions.column("prompt");

    // mention string -> reference label (nullopt: discarded)
    std::map<std::string, std::optional<std::string>> resolution;
    const bool vector_mode =
        !args.mention_vectors_path.empty() || !args.reference_vectors_path.empty();
    if (vector_mode) {
        if (args.mention_vectors_path.empty() || args.reference_vectors_path.empty())
            throw UsageError("vector resolution needs both --mention-vectors and "
                             "--reference-vectors");
        const VectorSet mention_vecs = read_vectors(args.mention_vectors_path);
        const VectorSet reference_vecs = read_vectors(args.reference_vectors_path);
        for (const LabeledVector& v : reference_vecs.vectors) {
            if (!reference_set.count(v.label))
                throw UsageError(args.reference_vectors_path + ": vector label \"" + v.label
                                 + "\" is not in the reference list");
        }
        const auto resolved =
            resolve_entities(mention_vecs, reference_vecs, args.eps, args.metric);
        for (std::size_t i = 0; i < mention_vecs.vectors.size(); ++i)
            resolution[mention_vecs.vectors[i].label] = resolved[i];
    }

    struct Bucket {
        std::vector<std::string> resolved;
        long long discarded = 0;
    };
    std::map<std::pair<std::string, std::string>, Bucket> buckets;
    for (std::size_t r = 0; r < mentions.rows.size(); ++r) {
        const auto& row = mentions.rows[r];
        const std::string mention = row[static_cast<std::size_t>(mention_col)];
        const std::string model =
            model_col < 0 ? "all" : row[static_cast<std::size_t>(model_col)];
        const std::string prompt =
            prompt_col < 0 ? "all" : row[static_cast<std::size_t>(prompt_col)];
        Bucket& bucket = buckets[{model, prompt}];

        std::optional<std::string> label;
        if (vector_mode) {
            const auto it = resolution.find(mention);
            if (it == resolution.end())
                throw UsageError(args.mentions_path + " row " + std::to_string(r + 2)
                                 + ": no vector for mention \"" + mention + "\"");
            label = it->second;
        } else if (reference_set.count(mention)) {
            label = mention;
        }
        if (label) bucket.resolved.push_back(*label);
        else ++bucket.discarded;
    }

    std::optional<std::map<std::string, double>> entity_weights;
    if (!args.weights_path.empty()) {
        entity_weights = read_weights(args.weights_path, "label");
        for (const std::string& label : reference) {
            if (!entity_weights->count(label))
                throw UsageError(args.weights_path + ": missing weight for entity \"" + label
                                 + "\"");
        }
    }
    std::optional<GroupPartition> partition;
    if (!args.group_map_path.empty()) {
        const CsvTable table = read_csv_file(args.group_map_path);
        const int lc = table.column("label");
        const int gc = table.column("group");
        if (lc < 0) throw UsageError(args.group_map_path + ": missing column \"label\"");
        if (gc < 0) throw UsageError(args.group_map_path + ": missing column \"group\"");
        partition.emplace();
        for (const auto& row : table.rows) {
            partition->entity_group[row[static_cast<std::size_t>(lc)]] =
                row[static_cast<std::size_t>(gc)];
        }
        std::set<std::string> groups;
        for (const auto& [label, group] : partition->entity_group) groups.insert(group);
        if (!args.group_weights_path.empty()) {
            partition->group_weights = read_weights(args.group_weights_path, "group");
        } else {
            for (const std::string& g : groups) partition->group_weights[g] = 1.0;
        }
    }

    // indices.csv: Table-4 layout, two-decimal indices, sorted by model then prompt
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& [key, bucket] : buckets) keys.push_back(key);
    std::sort(keys.begin(), keys.end());

    std::ostringstream indices;
    indices << "prompt,model,shannon,pielou\n";
    std::ostringstream violations;
    violations << "model,prompt,n_resolved,n_discarded,zero_count_entities,uniform_tv";
    if (entity_weights) violations << ",weighted_tv";
    if (partition) violations << ",group_tv";
    violations << '\n';

    std::map<std::string, FrequencyTable> per_prompt;
    for (const auto& key : keys) {
        const Bucket& bucket = buckets.at(key);
        const FrequencyTable table = frequency_table(bucket.resolved, R);
        for (const std::string& label : bucket.resolved)
            ++per_prompt[key.second].counts[label];
        per_prompt[key.second].reference_size = R;

        const bool has_counts = table.total() > 0;
        const double h = has_counts ? shannon_index(table) : 0.0;
        const double j = has_counts && R >= 2 ? pielou_evenness(h, R) : 0.0;
        indices << csv_escape(key.second) << ',' << csv_escape(key.first) << ','
                << format_2dp(h) << ',' << format_2dp(j) << '\n';

        const auto missing = minimal_representativeness(table, reference);
        std::map<std::string, double> uniform;
        for (const std::string& label : reference) uniform[label] = 1.0;
        violations << csv_escape(key.first) << ',' << csv_escape(key.second) << ','
                   << table.total() << ',' << bucket.discarded << ',' << missing.size() << ','
                   << (has_counts ? format_number(proportional_deviation(table, uniform))
                                  : std::string("1"));
        if (entity_weights)
            violations << ','
                       << (has_counts
                               ? format_number(proportional_deviation(table, *entity_weights))
                               : std::string("1"));
        if (partition)
            violations << ','
                       << (has_counts
                               ? format_number(group_proportional_deviation(table, *partition))
                               : std::string("1"));
        violations << '\n';
    }

    std::vector<std::string> artifacts{"indices.csv", "violations.csv"};
    write_text_file(join_path(args.out_dir, "indices.csv"), indices.str());
    write_text_file(join_path(args.out_dir, "violations.csv"), violations.str());

    for (const auto& [prompt, table] : per_prompt) {
        std::vector<std::pair<long long, std::string>> ranked;
        for (const std::string& label : reference) {
            const auto it = table.counts.find(label);
            ranked.emplace_back(it == table.counts.end() ? 0 : it->second, label);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::ostringstream freq;
        freq << "rank,entity,count\n";
        for (std::size_t i = 0; i < ranked.size(); ++i)
            freq << i + 1 << ',' << csv_escape(ranked[i].second) << ',' << ranked[i].first
                 << '\n';
        const std::string name = "freq_" + sanitize_for_filename(prompt) + ".csv";
        write_text_file(join_path(args.out_dir, name), freq.str());
        artifacts.push_back(name);
    }

    json payload;
    payload["mentions"] = args.mentions_path;
    payload["reference"] = args.reference_path;
    payload["mention_vectors"] = args.mention_vectors_path;
    payload["reference_vectors"] = args.reference_vectors_path;
    payload["weights"] = args.weights_path;
    payload["group_map"] = args.group_map_path;
    payload["group_weights"] = args.group_weights_path;
    payload["eps"] = args.eps;
    payload["metric"] = args.metric == DistanceMetric::Euclidean ? "euclidean" : "cosine";
    return write_metadata(args.out_dir, args.mentions_path, "diversity", "args", payload,
                          artifacts);
}

DiversityArgs diversity_args_from_metadata(const std::string& path) {
    const json j = load_command_input(path, "diversity", "args");
    DiversityArgs args;
    args.mentions_path = j.value("mentions", "");
    args.reference_path = j.value("reference", "");
    args.mention_vectors_path = j.value("mention_vectors", "");
    args.reference_vectors_path = j.value("reference_vectors", "");
    args.weights_path = j.value("weights", "");
    args.group_map_path = j.value("group_map", "");
    args.group_weights_path = j.value("group_weights", "");
    args.eps = j.value("eps", 3.0);
    const std::string metric = j.value("metric", "euclidean");
    if (metric == "euclidean") args.metric = DistanceMetric::Euclidean;
    else if (metric == "cosine") args.metric = DistanceMetric::Cosine;
    else throw ConfigError(path + ": unknown metric \"" + metric + "\"");
    return args;
}

}  // namespace collapse
