#include "collapse/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "collapse/stats.hpp"

namespace collapse {

namespace {

constexpr std::uint64_t kPeriodNoneTag = 0xffffffffffffffffULL;

std::uint64_t coord_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

double axis_sort_value(const std::string& axis, const CellCoords& c) {
    if (axis == "delta") return c.delta;
    if (axis == "eta") return c.eta;
    if (axis == "sigma_tr") return c.sigma_tr;
    if (axis == "df") return c.df;
    // "none" sorts after every finite period
    return c.generation_period ? static_cast<double>(*c.generation_period)
                               : std::numeric_limits<double>::infinity();
}

}  // namespace

const std::vector<std::string> kSweepAxisNames = {"delta", "eta", "sigma_tr",
                                                  "generation_period", "df"};

void validate(const SweepGrid& grid) {
    if (grid.replications < 1) throw ConfigError("replications must be >= 1");
    SimConfig probe = grid.base;
    probe.seed = 0;
    validate(probe);
    for (const CellCoords& c : expand_cells(grid)) {
        SimConfig cfg = config_for(grid, c, 0);
        validate(cfg);
    }
}

std::uint64_t derive_run_seed(std::uint64_t base_seed, const CellCoords& coords,
                              int replication) {
    std::uint64_t h = splitmix64(base_seed);
    h = hash_combine(h, coord_bits(coords.delta));
    h = hash_combine(h, coord_bits(coords.eta));
    h = hash_combine(h, coord_bits(coords.sigma_tr));
    h = hash_combine(h, coords.generation_period
                            ? static_cast<std::uint64_t>(*coords.generation_period)
                            : kPeriodNoneTag);
    h = hash_combine(h, coord_bits(coords.df));
    h = hash_combine(h, static_cast<std::uint64_t>(replication));
    return h;
}

SimConfig config_for(const SweepGrid& grid, const CellCoords& coords, int replication) {
    SimConfig cfg = grid.base;
    cfg.delta = coords.delta;
    cfg.eta = coords.eta;
    cfg.sigma_tr = coords.sigma_tr;
    cfg.generation_period = coords.generation_period;
    cfg.df = coords.df;
    cfg.seed = derive_run_seed(grid.base_seed, coords, replication);
    return cfg;
}

std::vector<CellCoords> expand_cells(const SweepGrid& grid) {
    const std::vector<double> deltas = grid.delta.empty()
                                           ? std::vector<double>{grid.base.delta}
                                           : grid.delta;
    const std::vector<double> etas = grid.eta.empty() ? std::vector<double>{grid.base.eta}
                                                      : grid.eta;
    const std::vector<double> sigmas = grid.sigma_tr.empty()
                                           ? std::vector<double>{grid.base.sigma_tr}
                                           : grid.sigma_tr;
    const std::vector<std::optional<int>> periods =
        grid.generation_period.empty()
            ? std::vector<std::optional<int>>{grid.base.generation_period}
            : grid.generation_period;
    const std::vector<double> dfs = grid.df.empty() ? std::vector<double>{grid.base.df}
                                                    : grid.df;
    std::vector<CellCoords> cells;
    cells.reserve(deltas.size() * etas.size() * sigmas.size() * periods.size() * dfs.size());
    for (double d : deltas)
        for (double e : etas)
            for (double s : sigmas)
                for (const auto& p : periods)
                    for (double f : dfs) cells.push_back(CellCoords{d, e, s, p, f});
    return cells;
}

SweepResult run_sweep(const SweepGrid& grid, int workers) {
    validate(grid);
    const std::vector<CellCoords> cells = expand_cells(grid);
    const std::size_t total = cells.size() * static_cast<std::size_t>(grid.replications);

    SweepResult result;
    result.runs.resize(total);

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            const CellCoords& coords = cells[idx / static_cast<std::size_t>(grid.replications)];
            const int rep = static_cast<int>(idx % static_cast<std::size_t>(grid.replications));
            RunOutcome& out = result.runs[idx];
            out.coords = coords;
            out.replication = rep;
            out.seed = derive_run_seed(grid.base_seed, coords, rep);
            try {
                const SimResult sim = run_simulation(config_for(grid, coords, rep));
                out.status = sim.status;
                out.final_hellinger = sim.final_hellinger;
                out.final_variance = sim.variance_trajectory.back();
                if (grid.collect_final_pdfs) out.final_pdf = sim.final_public_pdf;
            } catch (const std::exception& ex) {
                out.status = std::string("error: ") + ex.what();
            }
        }
    };

    const int n_threads = std::max(1, workers);
    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    return result;
}

std::string format_axis_value(const std::string& axis, const CellCoords& coords) {
    if (axis == "generation_period")
        return coords.generation_period ? std::to_string(*coords.generation_period)
                                        : std::string("none");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", axis_sort_value(axis, coords));
    return buf;
}

std::vector<AggregateRow> aggregate(const SweepResult& result,
                                    const std::vector<std::string>& group_by) {
    for (const std::string& axis : group_by) {
        if (std::find(kSweepAxisNames.begin(), kSweepAxisNames.end(), axis)
            == kSweepAxisNames.end())
            throw UsageError("unknown sweep axis: " + axis);
    }

    std::map<std::vector<double>, std::pair<std::vector<double>, std::vector<double>>> groups;
    std::map<std::vector<double>, std::vector<std::string>> labels;
    for (const RunOutcome& run : result.runs) {
        if (!run.has_values()) continue;
        std::vector<double> key;
        std::vector<std::string> label;
        key.reserve(group_by.size());
        for (const std::string& axis : group_by) {
            key.push_back(axis_sort_value(axis, run.coords));
            label.push_back(format_axis_value(axis, run.coords));
        }
        auto& [hs, vs] = groups[key];
        hs.push_back(run.final_hellinger);
        vs.push_back(run.final_variance);
        labels.emplace(key, std::move(label));
    }

    std::vector<AggregateRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, data] : groups) {
        const auto& [hs, vs] = data;
        AggregateRow row;
        row.key_labels = labels.at(key);
        row.mean_hellinger = mean(hs);
        row.std_hellinger = sample_stddev(hs);
        row.mean_variance = mean(vs);
        row.std_variance = sample_stddev(vs);
        row.n = static_cast<int>(hs.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace collapse
