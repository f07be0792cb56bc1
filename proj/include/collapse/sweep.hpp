#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collapse/simulation.hpp"

namespace collapse {

// One point of the parameter grid, in fixed axis order
// (delta, eta, sigma_tr, generation_period, df).
struct CellCoords {
    double delta;
    double eta;
    double sigma_tr;
    std::optional<int> generation_period;
    double df;

    bool operator==(const CellCoords&) const = default;
};

struct SweepGrid {
    SimConfig base;
    // Empty axis lists fall back to the base config's value, so every run
    // still carries a full coordinate.
    std::vector<double> delta;
    std::vector<double> eta;
    std::vector<double> sigma_tr;
    std::vector<std::optional<int>> generation_period;
    std::vector<double> df;
    int replications = 1;
    std::uint64_t base_seed = 0;
    bool collect_final_pdfs = false;
};

void validate(const SweepGrid& grid);

struct RunOutcome {
    CellCoords coords;
    int replication = 0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    double final_hellinger = 0.0;
    double final_variance = 0.0;
    std::optional<GriddedPdf> final_pdf;  // only when collect_final_pdfs

    bool has_values() const { return status.rfind("error", 0) != 0; }
};

struct SweepResult {
    std::vector<RunOutcome> runs;  // cartesian order, replications innermost
};

struct AggregateRow {
    std::vector<std::string> key_labels;  // formatted per group-by axis
    double mean_hellinger = 0.0;
    double std_hellinger = 0.0;
    double mean_variance = 0.0;
    double std_variance = 0.0;
    int n = 0;
};

// Seeds bind to coordinate values, not grid positions, so editing an axis
// list never perturbs other cells.
std::uint64_t derive_run_seed(std::uint64_t base_seed, const CellCoords& coords,
                              int replication);

SimConfig config_for(const SweepGrid& grid, const CellCoords& coords, int replication);

std::vector<CellCoords> expand_cells(const SweepGrid& grid);

// Executes every (cell, replication) run; results are identical for any
// worker count. Per-run failures are recorded in the status, never thrown.
SweepResult run_sweep(const SweepGrid& grid, int workers = 1);

// Group runs by the named axes; rows sorted by the group key values.
std::vector<AggregateRow> aggregate(const SweepResult& result,
                                    const std::vector<std::string>& group_by);

extern const std::vector<std::string> kSweepAxisNames;

std::string format_axis_value(const std::string& axis, const CellCoords& coords);

}  // namespace collapse
