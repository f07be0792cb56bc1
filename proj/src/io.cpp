#include "collapse/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "collapse/csv.hpp"

namespace collapse {

namespace {

using nlohmann::json;

[[noreturn]] void rethrow_with_line(const std::string& path, const std::string& text,
                                    const json::parse_error& err) {
    std::size_t line = 1;
    const std::size_t stop = std::min(text.size(), static_cast<std::size_t>(err.byte));
    for (std::size_t i = 0; i < stop; ++i)
        if (text[i] == '\n') ++line;
    throw ConfigError(path + ":" + std::to_string(line) + ": " + err.what());
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key))
            throw ConfigError("unknown field \"" + key + "\" in " + context);
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("field \"" + key + "\" has the wrong type");
    }
}

GridSpec grid_from_json(const json& j) {
    reject_unknown_keys(j, {"min", "max", "n_points"}, "grid");
    GridSpec grid;
    grid.min = get_or(j, "min", grid.min);
    grid.max = get_or(j, "max", grid.max);
    grid.n_points = get_or(j, "n_points", grid.n_points);
    return grid;
}

KdeSpec kde_from_json(const json& j) {
    reject_unknown_keys(j, {"bandwidth_rule", "h"}, "kde");
    KdeSpec spec;
    const std::string rule = get_or<std::string>(j, "bandwidth_rule", "silverman");
    if (rule == "silverman") {
        spec.rule = BandwidthRule::Silverman;
    } else if (rule == "fixed") {
        spec.rule = BandwidthRule::Fixed;
        if (!j.contains("h")) throw ConfigError("kde bandwidth_rule \"fixed\" requires \"h\"");
        spec.fixed_h = j.at("h").get<double>();
    } else {
        throw ConfigError("kde bandwidth_rule must be \"silverman\" or \"fixed\" (got \""
                          + rule + "\")");
    }
    return spec;
}

std::optional<int> period_from_json(const json& v) {
    if (v.is_null()) return std::nullopt;
    if (v.is_string() && v.get<std::string>() == "none") return std::nullopt;
    if (!v.is_number_integer())
        throw ConfigError("generation_period must be an integer or null");
    return v.get<int>();
}

}  // namespace

json parse_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        rethrow_with_line(path, text, err);
    }
}

SimConfig sim_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(j,
                        {"n_agents", "n_rounds", "buffer_size", "df", "sigma_tr", "delta",
                         "eta", "generation_period", "cost_full", "v_init", "update_rule",
                         "reset_buffer_on_turnover", "reset_estimates_on_turnover", "kde",
                         "grid", "seed"},
                        "config");
    SimConfig cfg;
    cfg.n_agents = get_or(j, "n_agents", cfg.n_agents);
    cfg.n_rounds = get_or(j, "n_rounds", cfg.n_rounds);
    cfg.buffer_size = get_or(j, "buffer_size", cfg.buffer_size);
    cfg.df = get_or(j, "df", cfg.df);
    cfg.sigma_tr = get_or(j, "sigma_tr", cfg.sigma_tr);
    cfg.delta = get_or(j, "delta", cfg.delta);
    cfg.eta = get_or(j, "eta", cfg.eta);
    if (j.contains("generation_period"))
        cfg.generation_period = period_from_json(j.at("generation_period"));
    cfg.cost_full = get_or(j, "cost_full", cfg.cost_full);
    cfg.v_init = get_or(j, "v_init", cfg.v_init);
    const std::string rule = get_or<std::string>(j, "update_rule", "ema");
    if (rule == "ema") cfg.update_rule = UpdateRule::Ema;
    else if (rule == "paper_literal") cfg.update_rule = UpdateRule::PaperLiteral;
    else throw ConfigError("update_rule must be \"ema\" or \"paper_literal\" (got \"" + rule + "\")");
    cfg.reset_buffer_on_turnover = get_or(j, "reset_buffer_on_turnover", false);
    cfg.reset_estimates_on_turnover = get_or(j, "reset_estimates_on_turnover", false);
    if (j.contains("kde")) cfg.kde = kde_from_json(j.at("kde"));
    if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    validate(cfg);
    return cfg;
}

json to_json(const SimConfig& cfg) {
    json j;
    j["n_agents"] = cfg.n_agents;
    j["n_rounds"] = cfg.n_rounds;
    j["buffer_size"] = cfg.buffer_size;
    j["df"] = cfg.df;
    j["sigma_tr"] = cfg.sigma_tr;
    j["delta"] = cfg.delta;
    j["eta"] = cfg.eta;
    if (cfg.generation_period) j["generation_period"] = *cfg.generation_period;
    else j["generation_period"] = nullptr;
    j["cost_full"] = cfg.cost_full;
    j["v_init"] = cfg.v_init;
    j["update_rule"] = cfg.update_rule == UpdateRule::Ema ? "ema" : "paper_literal";
    j["reset_buffer_on_turnover"] = cfg.reset_buffer_on_turnover;
    j["reset_estimates_on_turnover"] = cfg.reset_estimates_on_turnover;
    if (cfg.kde.rule == BandwidthRule::Silverman) {
        j["kde"] = {{"bandwidth_rule", "silverman"}};
    } else {
        j["kde"] = {{"bandwidth_rule", "fixed"}, {"h", cfg.kde.fixed_h}};
    }
    j["grid"] = {{"min", cfg.grid.min}, {"max", cfg.grid.max}, {"n_points", cfg.grid.n_points}};
    j["seed"] = cfg.seed;
    return j;
}

SweepGrid sweep_grid_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("sweep definition must be a JSON object");
    reject_unknown_keys(j, {"base_config", "axes", "replications", "base_seed",
                            "emit_final_pdfs"},
                        "sweep definition");
    SweepGrid grid;
    if (j.contains("base_config")) grid.base = sim_config_from_json(j.at("base_config"));
    if (j.contains("axes")) {
        const json& axes = j.at("axes");
        reject_unknown_keys(axes, {"delta", "eta", "sigma_tr", "generation_period", "df"},
                            "sweep axes");
        grid.delta = get_or(axes, "delta", grid.delta);
        grid.eta = get_or(axes, "eta", grid.eta);
        grid.sigma_tr = get_or(axes, "sigma_tr", grid.sigma_tr);
        grid.df = get_or(axes, "df", grid.df);
        if (axes.contains("generation_period")) {
            for (const json& v : axes.at("generation_period"))
                grid.generation_period.push_back(period_from_json(v));
        }
    }
    grid.replications = get_or(j, "replications", grid.replications);
    grid.base_seed = get_or<std::uint64_t>(j, "base_seed", grid.base_seed);
    grid.collect_final_pdfs = get_or(j, "emit_final_pdfs", false);
    validate(grid);
    return grid;
}

json to_json(const SweepGrid& grid) {
    json axes = json::object();
    if (!grid.delta.empty()) axes["delta"] = grid.delta;
    if (!grid.eta.empty()) axes["eta"] = grid.eta;
    if (!grid.sigma_tr.empty()) axes["sigma_tr"] = grid.sigma_tr;
    if (!grid.df.empty()) axes["df"] = grid.df;
    if (!grid.generation_period.empty()) {
        json periods = json::array();
        for (const auto& p : grid.generation_period) {
            if (p) periods.push_back(*p);
            else periods.push_back(nullptr);
        }
        axes["generation_period"] = periods;
    }
    json j;
    j["base_config"] = to_json(grid.base);
    j["axes"] = axes;
    j["replications"] = grid.replications;
    j["base_seed"] = grid.base_seed;
    j["emit_final_pdfs"] = grid.collect_final_pdfs;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string rounds_csv(const SimResult& result) {
    std::ostringstream out;
    out << "round,n_full,n_trunc,n_abstain,hellinger,variance,v_full,v_trunc\n";
    for (const RoundRecord& r : result.rounds) {
        out << r.round << ',' << r.n_full << ',' << r.n_trunc << ',' << r.n_abstain << ','
            << format_number(r.hellinger_to_truth) << ',' << format_number(r.public_variance)
            << ',' << format_number(r.v_full) << ',' << format_number(r.v_trunc) << '\n';
    }
    return out.str();
}

std::string pdf_csv(const GriddedPdf& pdf) {
    std::ostringstream out;
    out << "x,density\n";
    for (int i = 0; i < pdf.grid.n_points; ++i)
        out << format_number(pdf.grid.x(i)) << ','
            << format_number(pdf.densities[static_cast<std::size_t>(i)]) << '\n';
    return out.str();
}

std::string sweep_runs_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "delta,eta,sigma_tr,generation_period,df,replication,seed,status,"
           "final_hellinger,final_variance\n";
    for (const RunOutcome& run : result.runs) {
        out << format_number(run.coords.delta) << ',' << format_number(run.coords.eta) << ','
            << format_number(run.coords.sigma_tr) << ','
            << format_axis_value("generation_period", run.coords) << ','
            << format_number(run.coords.df) << ',' << run.replication << ',' << run.seed
            << ',' << csv_escape(run.status) << ',';
        if (run.has_values())
            out << format_number(run.final_hellinger) << ',' << format_number(run.final_variance);
        else
            out << ',';
        out << '\n';
    }
    return out.str();
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows,
                          const std::vector<std::string>& group_by) {
    std::ostringstream out;
    for (const std::string& axis : group_by) out << axis << ',';
    out << "mean_hellinger,std_hellinger,mean_variance,std_variance,n\n";
    for (const AggregateRow& row : rows) {
        for (const std::string& label : row.key_labels) out << label << ',';
        out << format_number(row.mean_hellinger) << ',' << format_number(row.std_hellinger)
            << ',' << format_number(row.mean_variance) << ','
            << format_number(row.std_variance) << ',' << row.n << '\n';
    }
    return out.str();
}

}  // namespace collapse
