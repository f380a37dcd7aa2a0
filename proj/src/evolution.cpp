#include "evoq/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evoq/errors.hpp"
#include "evoq/parallel.hpp"

namespace evoq {

namespace {

// Index drawn with probability proportional to weights; weights[skip] is ignored.
std::size_t draw_weighted(const std::vector<double>& weights, std::size_t skip, Rng& rng) {
    double total = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (j != skip) total += weights[j];
    }
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    std::size_t last = skip;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (j == skip || weights[j] <= 0.0) continue;
        acc += weights[j];
        last = j;
        if (u < acc) return j;
    }
    return last;  // u landed on the rounding slack at the top
}

// Fitness weights relative to the best agent other than `dying`.
std::vector<double> fitness_weights(const std::vector<AgentState>& agents, std::size_t dying, double beta) {
    const std::size_t n = agents.size();
    std::vector<double> w(n, 0.0);
    if (beta == 0.0) {
        std::fill(w.begin(), w.end(), 1.0);
        w[dying] = 0.0;
        return w;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (j != dying) best = std::max(best, agents[j].average_payoff());
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (j == dying) continue;
        const double diff = agents[j].average_payoff() - best;
        if (std::isinf(beta)) {
            w[j] = diff == 0.0 ? 1.0 : 0.0;
        } else {
            w[j] = std::exp(beta * diff);
        }
    }
    return w;
}

} // namespace

PopulationState make_population(std::size_t n, const LearnerParams& params, std::uint64_t seed) {
    PopulationState pop;
    pop.agents.resize(n);
    for (auto& a : pop.agents) a.params = params;
    pop.rng.seed(seed);
    return pop;
}

RoundOutcome play_round(PopulationState& pop, const RewardFunction& reward) {
    if (pop.agents.size() != reward.group_size()) {
        throw DomainError("population size does not match reward group size");
    }
    ActionProfile profile(pop.agents.size());
    std::vector<Action> actions(pop.agents.size());
    for (std::size_t i = 0; i < pop.agents.size(); ++i) {
        const auto& a = pop.agents[i];
        actions[i] = sample_action(boltzmann_policy(a.q_values, a.params.temperature), pop.rng);
        profile[i] = actions[i] == Action::contribute ? 1 : 0;
    }
    const auto pay = payoffs(profile, reward);
    RoundOutcome out;
    for (std::size_t i = 0; i < pop.agents.size(); ++i) {
        pop.agents[i] = q_update(pop.agents[i], actions[i], pay[i]);
        out.contributors += static_cast<std::size_t>(profile[i]);
    }
    return out;
}

std::size_t replacement_step(PopulationState& pop, const EvolutionParams& evo) {
    if (evo.replacement_rate <= 0.0) return 0;
    const std::size_t n = pop.agents.size();
    std::vector<std::size_t> dying;
    for (std::size_t i = 0; i < n; ++i) {
        if (uniform01(pop.rng) < evo.replacement_rate) dying.push_back(i);
    }
    if (dying.empty()) return 0;

    const auto& before = pop.agents;
    std::vector<AgentState> newborns;
    newborns.reserve(dying.size());
    for (std::size_t d : dying) {
        const auto w = fitness_weights(before, d, evo.selection_strength);
        const auto& parent = before[draw_weighted(w, d, pop.rng)];
        AgentState child;
        child.params = parent.params;
        child.lineage = parent.lineage;
        child.birth_step = pop.step;
        if (evo.mutation_prob > 0.0 && uniform01(pop.rng) < evo.mutation_prob) {
            std::normal_distribution<double> kernel(0.0, evo.mutation_sigma);
            child.params.temperature = std::clamp(child.params.temperature + kernel(pop.rng),
                                                  evo.temperature_min, evo.temperature_max);
        }
        newborns.push_back(child);
    }
    for (std::size_t k = 0; k < dying.size(); ++k) pop.agents[dying[k]] = newborns[k];
    return dying.size();
}

RoundOutcome iterate(PopulationState& pop, const RewardFunction& reward, const EvolutionParams& evo) {
    const auto out = play_round(pop, reward);
    replacement_step(pop, evo);
    ++pop.step;
    return out;
}

double mean_strategy(const PopulationState& pop) {
    double s = 0.0;
    for (const auto& a : pop.agents) s += contribution_probability(a);
    return s / static_cast<double>(pop.agents.size());
}

double mean_temperature(const PopulationState& pop) {
    double s = 0.0;
    for (const auto& a : pop.agents) s += a.params.temperature;
    return s / static_cast<double>(pop.agents.size());
}

double strategy_stddev(const PopulationState& pop) {
    const double mean = mean_strategy(pop);
    double ss = 0.0;
    for (const auto& a : pop.agents) {
        const double d = contribution_probability(a) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(pop.agents.size()));
}

Trajectory run_simulation(const SimulationConfig& config, std::uint64_t seed) {
    config.validate();
    auto pop = make_population(config.group_size, config.learner, seed);
    Trajectory traj;
    traj.rows.reserve(config.iterations);
    for (std::uint64_t it = 0; it < config.iterations; ++it) {
        const auto round = iterate(pop, config.reward, config.evolution);
        TrajectoryRow row;
        row.step = pop.step;
        row.mean_strategy = mean_strategy(pop);
        row.mean_temperature = mean_temperature(pop);
        row.empirical_contribution =
            static_cast<double>(round.contributors) / static_cast<double>(config.group_size);
        const bool last = it + 1 == config.iterations;
        if (config.sample_interval > 0 && (pop.step % config.sample_interval == 0 || last)) {
            std::vector<double> xs;
            for (const auto& a : pop.agents) xs.push_back(contribution_probability(a));
            row.agent_strategies = std::move(xs);
        }
        traj.rows.push_back(std::move(row));
    }
    for (const auto& a : pop.agents) {
        traj.final_strategies.push_back(contribution_probability(a));
        traj.final_temperatures.push_back(a.params.temperature);
    }
    return traj;
}

FixationOutcome run_fixation_trial(double resident_t, double mutant_t, const SimulationConfig& config,
                                   std::uint64_t seed) {
    LearnerParams resident = config.learner;
    resident.temperature = resident_t;
    auto pop = make_population(config.group_size, resident, seed);
    const auto n = pop.agents.size();
    const auto slot = std::min<std::size_t>(n - 1, static_cast<std::size_t>(uniform01(pop.rng) * n));
    pop.agents[slot].params.temperature = mutant_t;
    pop.agents[slot].lineage = 1;

    EvolutionParams evo = config.evolution;
    evo.mutation_prob = 0.0;
    std::size_t mutants = 1;
    while (pop.step < config.fixation.max_steps) {
        iterate(pop, config.reward, evo);
        mutants = static_cast<std::size_t>(std::count_if(pop.agents.begin(), pop.agents.end(),
                                                         [](const AgentState& a) { return a.lineage == 1; }));
        if (mutants == n) return FixationOutcome::fixation;
        if (mutants == 0) return FixationOutcome::extinction;
    }
    return FixationOutcome::censored;
}

FixationEstimate estimate_fixation(double resident_t, double mutant_t, const SimulationConfig& config,
                                   std::uint64_t trials, unsigned threads) {
    if (trials == 0) throw DomainError("fixation estimate needs at least one trial");
    if (!(resident_t > 0.0) || !(mutant_t > 0.0)) throw DomainError("temperatures must be > 0");
    if (!(config.evolution.replacement_rate > 0.0)) {
        throw ConfigError("replacement_rate", "must be > 0 for fixation (no turnover otherwise)");
    }
    config.validate();

    std::vector<FixationOutcome> outcomes(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
        const auto seed = derive_seed(config.master_seed, {0xf1a7ULL, i});
        outcomes[i] = run_fixation_trial(resident_t, mutant_t, config, seed);
    });

    FixationEstimate est;
    est.resident_temperature = resident_t;
    est.mutant_temperature = mutant_t;
    est.trials = trials;
    for (auto o : outcomes) {
        switch (o) {
            case FixationOutcome::fixation: ++est.fixations; break;
            case FixationOutcome::extinction: ++est.extinctions; break;
            case FixationOutcome::censored: ++est.censored; break;
        }
    }
    const auto decided = est.fixations + est.extinctions;
    if (decided > 0) {
        const double p = static_cast<double>(est.fixations) / static_cast<double>(decided);
        est.probability = p;
        est.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(decided));
    }
    return est;
}

} // namespace evoq
