#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "collapse/density.hpp"
#include "collapse/distributions.hpp"

namespace collapse {

enum class Action { Full, Truncated, Abstain };

const char* to_string(Action a);

struct Agent {
    int id;
    double theta;  // lognormal type multiplying expected innovation return
};

enum class UpdateRule { Ema, PaperLiteral };

// Shared value estimates for the two sampling arms, with the append-only
// per-arm history of realized innovations that backs the minimum-of-three
// update rule. Rewards are publicly observed, so one instance serves all
// agents.
struct ValueEstimates {
    double v_full;
    double v_trunc;
    std::vector<double> history_full;
    std::vector<double> history_trunc;
};

struct SimConfig {
    int n_agents = 25;
    int n_rounds = 100;
    int buffer_size = 100;
    double df = 10.0;
    double sigma_tr = 0.75;
    double delta = 1.0;    // AI discount: truncated sample costs delta * cost_full
    double eta = 0.05;     // learning rate
    std::optional<int> generation_period = 10;  // nullopt: no generational turnover
    double cost_full = 0.05;
    double v_init = 0.05;
    UpdateRule update_rule = UpdateRule::Ema;
    bool reset_buffer_on_turnover = false;
    bool reset_estimates_on_turnover = false;
    KdeSpec kde;
    GridSpec grid;
    std::uint64_t seed = 0;

    // generation_period above n_rounds behaves as "none".
    std::optional<int> effective_generation_period() const {
        if (generation_period && *generation_period > n_rounds) return std::nullopt;
        return generation_period;
    }
};

void validate(const SimConfig& config);

struct AgentOutcome {
    Action action = Action::Abstain;
    double innovation = 0.0;
};

struct RoundRecord {
    int round = 0;  // 1-based
    std::vector<AgentOutcome> agents;
    int n_full = 0;
    int n_trunc = 0;
    int n_abstain = 0;
    double hellinger_to_truth = 0.0;
    double public_variance = 0.0;
    double v_full = 0.0;   // estimates after this round's update
    double v_trunc = 0.0;
};

struct SimResult {
    SimConfig config;
    std::vector<RoundRecord> rounds;
    GriddedPdf final_public_pdf;
    double final_hellinger = 0.0;
    std::vector<double> variance_trajectory;
    std::vector<double> horizon_stds;  // sampling std after each turnover, initial first
    int collapse_floor_events = 0;
    std::string status = "ok";
};

struct CollapseMetrics {
    std::vector<double> variance_trajectory;
    bool narrowing = false;
    double final_hellinger = 0.0;
};

// Buffered sample with the arm it came from.
struct BufferEntry {
    double value;
    Action arm;
};

// Full evolving state of one run. The public pdf is kept equal to
// fit_kde over the current buffer contents at all times.
struct SimState {
    SimConfig config;
    std::vector<Agent> agents;
    ValueEstimates estimates;
    std::vector<BufferEntry> buffer;  // ring, capacity buffer_size
    std::size_t buffer_next = 0;      // slot overwritten by the next insert
    TrueDistribution truth;           // fixed reference for all distances
    GriddedPdf truth_pdf;
    TrueDistribution horizon;         // current sampling distribution
    TruncationSpec truncation;
    GriddedPdf public_pdf;
    int round_index = 0;       // completed rounds
    int generation_index = 0;  // completed turnovers
    int collapse_floor_events = 0;
    Rng rng;
};

// Net-payoff argmax over {full, truncated, abstain}; ties resolve
// Full > Truncated > Abstain.
Action decide(const Agent& agent, const ValueEstimates& est, double cost_full, double delta);

// previous distance - new distance, both taken to the truth pdf.
double innovation(const GriddedPdf& public_before, const GriddedPdf& public_after,
                  const GriddedPdf& truth);

// Applies the learning rule per arm; a nullopt realized mean leaves that
// arm's estimate unchanged.
void update_estimates(ValueEstimates& est, std::optional<double> realized_full,
                      std::optional<double> realized_trunc, double eta, UpdateRule rule);

// Agents with thetas drawn, buffer pre-filled with full-distribution draws,
// public pdf fitted.
SimState init_state(const SimConfig& config);

// One round: decisions, draws, shuffled one-at-a-time insertion with a
// public-pdf refit and an innovation payoff per insertion, then the shared
// estimate update.
RoundRecord run_round(SimState& state);

// Rescales the sampling horizon to the public pdf's standard deviation,
// recomputes truncation bounds, and redraws agent types.
void generation_turnover(SimState& state);

SimResult run_simulation(const SimConfig& config);

// Variance trajectory, a monotone-narrowing flag (fitted linear trend below
// -1e-4 per round), and the final distance.
CollapseMetrics collapse_metrics(const SimResult& result);

}  // namespace collapse
