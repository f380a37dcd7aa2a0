#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evoq/config.hpp"
#include "evoq/game.hpp"
#include "evoq/learner.hpp"
#include "evoq/random.hpp"

namespace evoq {

struct PopulationState {
    std::vector<AgentState> agents;
    std::uint64_t step = 0;
    Rng rng;
};

// N fresh agents with Q = (0, 0) and the given learner parameters.
PopulationState make_population(std::size_t n, const LearnerParams& params, std::uint64_t seed);

struct RoundOutcome {
    std::size_t contributors = 0;
};

// Every agent samples an action from its Boltzmann policy (agent order, one
// draw each), receives its public-goods payoff and updates its Q-values.
RoundOutcome play_round(PopulationState& pop, const RewardFunction& reward);

// Each agent independently dies with probability replacement_rate. Parents
// are chosen on the pre-step population, excluding the dying slot, with
// weight exp(beta * average payoff). Newborns inherit temperature (possibly
// mutated) and lineage, and start with Q = (0, 0) and no payoff history.
// Returns the number of replaced agents.
std::size_t replacement_step(PopulationState& pop, const EvolutionParams& evo);

// One iteration: play_round, replacement_step, step += 1.
RoundOutcome iterate(PopulationState& pop, const RewardFunction& reward, const EvolutionParams& evo);

double mean_strategy(const PopulationState& pop);
double mean_temperature(const PopulationState& pop);
double strategy_stddev(const PopulationState& pop);

struct TrajectoryRow {
    std::uint64_t step = 0;
    double mean_strategy = 0.0;
    double mean_temperature = 0.0;
    double empirical_contribution = 0.0;  // fraction of agents that contributed this round
    std::optional<std::vector<double>> agent_strategies;
};

struct Trajectory {
    std::vector<TrajectoryRow> rows;
    std::vector<double> final_strategies;
    std::vector<double> final_temperatures;
};

// Runs config.iterations iterations of one replica seeded with `seed`.
// Throws ConfigError on invalid configuration.
Trajectory run_simulation(const SimulationConfig& config, std::uint64_t seed);

struct FixationEstimate {
    double resident_temperature = 0.0;
    double mutant_temperature = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t fixations = 0;
    std::uint64_t extinctions = 0;
    std::uint64_t censored = 0;
    double probability = 0.0;     // fixations / (fixations + extinctions)
    double standard_error = 0.0;  // binomial, over non-censored trials
};

enum class FixationOutcome { fixation, extinction, censored };

// Single trial: N-1 residents and one mutant at a uniformly drawn slot.
FixationOutcome run_fixation_trial(double resident_t, double mutant_t, const SimulationConfig& config,
                                   std::uint64_t seed);

// Monte Carlo estimate over `trials` independent trials. Mutation is disabled.
// Trial i is seeded from (master_seed, i), so results do not depend on `threads`.
FixationEstimate estimate_fixation(double resident_t, double mutant_t, const SimulationConfig& config,
                                   std::uint64_t trials, unsigned threads = 1);

} // namespace evoq
