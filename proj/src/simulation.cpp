#include "collapse/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "collapse/stats.hpp"

namespace collapse {

namespace {

constexpr double kCollapseVarianceFloor = 1e-6;
constexpr double kCollapseStdFloor = 1e-3;

std::vector<double> buffer_values(const SimState& state) {
    std::vector<double> values;
    values.reserve(state.buffer.size());
    for (const BufferEntry& e : state.buffer) values.push_back(e.value);
    return values;
}

GriddedPdf refit_public(const SimState& state) {
    return fit_kde(buffer_values(state), state.config.kde, state.config.grid);
}

void draw_agents(SimState& state) {
    state.agents.clear();
    state.agents.reserve(static_cast<std::size_t>(state.config.n_agents));
    for (int i = 0; i < state.config.n_agents; ++i)
        state.agents.push_back(Agent{i, state.rng.lognormal(1.0, 0.5)});
}

// Realized mean backing the update: this round's observations when at least
// three exist, else the three most recent from the arm's history, else none.
std::optional<double> realized_mean(const std::vector<double>& history, int count_this_round) {
    const std::size_t take = count_this_round >= 3
                                 ? static_cast<std::size_t>(count_this_round)
                                 : std::size_t{3};
    if (history.size() < take) return std::nullopt;
    double sum = std::accumulate(history.end() - static_cast<std::ptrdiff_t>(take),
                                 history.end(), 0.0);
    return sum / static_cast<double>(take);
}

}  // namespace

const char* to_string(Action a) {
    switch (a) {
        case Action::Full: return "full";
        case Action::Truncated: return "truncated";
        case Action::Abstain: return "abstain";
    }
    return "?";
}

void validate(const SimConfig& config) {
    if (config.n_agents < 1) throw ConfigError("n_agents must be >= 1");
    if (config.n_rounds < 1) throw ConfigError("n_rounds must be >= 1");
    if (config.buffer_size < 3) throw ConfigError("buffer_size must be >= 3");
    if (!(config.delta > 0.0 && config.delta <= 1.0))
        throw ConfigError("delta must lie in (0, 1] (got " + std::to_string(config.delta) + ")");
    if (!(config.eta >= 0.0)) throw ConfigError("eta must be >= 0");
    if (config.generation_period && *config.generation_period < 1)
        throw ConfigError("generation_period must be >= 1 when present");
    if (!(config.cost_full > 0.0)) throw ConfigError("cost_full must be > 0");
    if (!std::isfinite(config.v_init)) throw ConfigError("v_init must be finite");
    validate(TrueDistribution{config.df, 0.0, 1.0});
    if (!(config.sigma_tr > 0.0)) throw ConfigError("sigma_tr must be > 0");
    validate(config.kde);
    validate(config.grid);
}

Action decide(const Agent& agent, const ValueEstimates& est, double cost_full, double delta) {
    const double net_full = agent.theta * est.v_full - cost_full;
    const double net_trunc = agent.theta * est.v_trunc - delta * cost_full;
    if (net_full >= net_trunc && net_full >= 0.0) return Action::Full;
    if (net_trunc >= 0.0) return Action::Truncated;
    return Action::Abstain;
}

double innovation(const GriddedPdf& public_before, const GriddedPdf& public_after,
                  const GriddedPdf& truth) {
    return hellinger(public_before, truth) - hellinger(public_after, truth);
}

void update_estimates(ValueEstimates& est, std::optional<double> realized_full,
                      std::optional<double> realized_trunc, double eta, UpdateRule rule) {
    const auto apply = [&](double v, double observed) {
        return rule == UpdateRule::Ema ? v + eta * (observed - v)
                                       : v + eta * (v - observed);
    };
    if (realized_full) est.v_full = apply(est.v_full, *realized_full);
    if (realized_trunc) est.v_trunc = apply(est.v_trunc, *realized_trunc);
}

SimState init_state(const SimConfig& config) {
    validate(config);
    SimState state{config,
                   {},
                   ValueEstimates{config.v_init, config.v_init, {}, {}},
                   {},
                   0,
                   TrueDistribution{config.df, 0.0, 1.0},
                   {},
                   TrueDistribution{config.df, 0.0, 1.0},
                   {},
                   {},
                   0,
                   0,
                   0,
                   Rng(config.seed)};
    state.truth_pdf = eval_grid(state.truth, config.grid);
    state.truncation = make_truncation(state.horizon, config.sigma_tr);
    draw_agents(state);
    state.buffer.reserve(static_cast<std::size_t>(config.buffer_size));
    for (int i = 0; i < config.buffer_size; ++i)
        state.buffer.push_back(BufferEntry{t_sample(state.rng, state.horizon), Action::Full});
    state.public_pdf = refit_public(state);
    return state;
}

RoundRecord run_round(SimState& state) {
    const SimConfig& cfg = state.config;
    RoundRecord rec;
    rec.round = state.round_index + 1;
    rec.agents.assign(static_cast<std::size_t>(cfg.n_agents), AgentOutcome{});

    // 1. Decisions, from the shared estimates of the previous round.
    std::vector<int> actors;
    for (const Agent& agent : state.agents) {
        const Action a = decide(agent, state.estimates, cfg.cost_full, cfg.delta);
        rec.agents[static_cast<std::size_t>(agent.id)].action = a;
        switch (a) {
            case Action::Full: ++rec.n_full; break;
            case Action::Truncated: ++rec.n_trunc; break;
            case Action::Abstain: ++rec.n_abstain; break;
        }
        if (a != Action::Abstain) actors.push_back(agent.id);
    }

    // 2. Draws, in agent order.
    std::vector<double> draws(static_cast<std::size_t>(cfg.n_agents), 0.0);
    for (int id : actors) {
        const Action a = rec.agents[static_cast<std::size_t>(id)].action;
        draws[static_cast<std::size_t>(id)] =
            a == Action::Full ? t_sample(state.rng, state.horizon)
                              : truncated_sample(state.rng, state.horizon, state.truncation);
    }

    // 3. Insertions in a fresh random order; each contributor is paid the
    // Hellinger movement toward truth produced at their own insertion step.
    for (std::size_t i = actors.size(); i > 1; --i)
        std::swap(actors[i - 1], actors[state.rng.uniform_below(i)]);

    int count_full = 0;
    int count_trunc = 0;
    double h_before = hellinger(state.public_pdf, state.truth_pdf);
    for (int id : actors) {
        const Action a = rec.agents[static_cast<std::size_t>(id)].action;
        state.buffer[state.buffer_next] = BufferEntry{draws[static_cast<std::size_t>(id)], a};
        state.buffer_next = (state.buffer_next + 1) % state.buffer.size();
        state.public_pdf = refit_public(state);
        const double h_after = hellinger(state.public_pdf, state.truth_pdf);
        const double payoff = h_before - h_after;
        rec.agents[static_cast<std::size_t>(id)].innovation = payoff;
        h_before = h_after;
        if (a == Action::Full) {
            state.estimates.history_full.push_back(payoff);
            ++count_full;
        } else {
            state.estimates.history_trunc.push_back(payoff);
            ++count_trunc;
        }
    }

    // 4. Shared estimate update from per-arm realized means.
    update_estimates(state.estimates,
                     realized_mean(state.estimates.history_full, count_full),
                     realized_mean(state.estimates.history_trunc, count_trunc),
                     cfg.eta, cfg.update_rule);

    rec.hellinger_to_truth = hellinger(state.public_pdf, state.truth_pdf);
    rec.public_variance = pdf_variance(state.public_pdf);
    rec.v_full = state.estimates.v_full;
    rec.v_trunc = state.estimates.v_trunc;
    ++state.round_index;
    return rec;
}

void generation_turnover(SimState& state) {
    double target_std = std::sqrt(pdf_variance(state.public_pdf));
    if (!(target_std * target_std >= kCollapseVarianceFloor)) {
        ++state.collapse_floor_events;
        target_std = kCollapseStdFloor;
    }
    state.horizon = rescale_distribution(state.horizon, target_std);
    state.truncation = make_truncation(state.horizon, state.config.sigma_tr);
    draw_agents(state);
    if (state.config.reset_estimates_on_turnover) {
        state.estimates = ValueEstimates{state.config.v_init, state.config.v_init, {}, {}};
    }
    if (state.config.reset_buffer_on_turnover) {
        for (BufferEntry& e : state.buffer)
            e = BufferEntry{t_sample(state.rng, state.horizon), Action::Full};
        state.buffer_next = 0;
        state.public_pdf = refit_public(state);
    }
    ++state.generation_index;
}

SimResult run_simulation(const SimConfig& config) {
    SimState state = init_state(config);
    const std::optional<int> period = config.effective_generation_period();

    SimResult result;
    result.config = config;
    result.rounds.reserve(static_cast<std::size_t>(config.n_rounds));
    result.horizon_stds.push_back(dist_std(state.horizon));
    for (int round = 1; round <= config.n_rounds; ++round) {
        result.rounds.push_back(run_round(state));
        if (period && round % *period == 0 && round < config.n_rounds) {
            generation_turnover(state);
            result.horizon_stds.push_back(dist_std(state.horizon));
        }
    }
    result.final_public_pdf = state.public_pdf;
    result.final_hellinger = hellinger(state.public_pdf, state.truth_pdf);
    result.variance_trajectory.reserve(result.rounds.size());
    for (const RoundRecord& r : result.rounds)
        result.variance_trajectory.push_back(r.public_variance);
    result.collapse_floor_events = state.collapse_floor_events;
    if (state.collapse_floor_events > 0) result.status = "collapse_floor";
    return result;
}

CollapseMetrics collapse_metrics(const SimResult& result) {
    CollapseMetrics metrics;
    metrics.variance_trajectory = result.variance_trajectory;
    metrics.final_hellinger = result.final_hellinger;
    if (result.variance_trajectory.size() >= 2) {
        std::vector<double> rounds(result.variance_trajectory.size());
        std::iota(rounds.begin(), rounds.end(), 1.0);
        const double slope = linear_slope(rounds, result.variance_trajectory);
        metrics.narrowing = slope < -1e-4;
    }
    return metrics;
}

}  // namespace collapse
