#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evoq/game.hpp"
#include "evoq/learner.hpp"

namespace evoq {

struct EvolutionParams {
    double replacement_rate = 0.0;    // per-agent death probability per step
    double selection_strength = 1.0;  // beta in fitness exp(beta * average payoff)
    double mutation_prob = 0.0;
    double mutation_sigma = 0.05;
    double temperature_min = 0.01;
    double temperature_max = 2.0;

    // Throws ConfigError naming the first invalid field.
    void validate() const;
};

// Settings for the deterministic learning system and its equilibria.
struct SolverSettings {
    double tolerance = 1e-9;   // equilibrium declared when max |dx/dt| and fixed-point residual fall below
    double max_time = 1e6;     // in units of 1/alpha
    double rtol = 1e-8;
    double atol = 1e-10;
    std::uint64_t max_steps = 20'000'000;

    void validate() const;
};

struct FixationSettings {
    double mutant_temperature = 1.0;
    std::uint64_t trials = 1000;
    std::uint64_t max_steps = 1'000'000;
};

struct AdaptiveSettings {
    double start_temperature = 0.05;
    double temperature_min = 0.05;
    double temperature_max = 1.0;
    double step = 0.01;
    double mutant_temperature = 0.06;  // used by the single-pair `invasion` subcommand
};

struct SweepSettings {
    std::vector<double> alphas;
    std::vector<double> gammas;
    std::vector<double> temperatures;
    std::vector<double> replacement_rates;
    double m_max = 10.0;
    std::size_t resolution = 20;
};

struct SimulationConfig {
    std::size_t group_size = 0;
    bool has_reward = false;
    RewardFunction reward;
    std::optional<double> linear_k;  // set when the reward was given as a slope
    LearnerParams learner;
    EvolutionParams evolution;
    std::uint64_t iterations = 500;
    std::uint64_t replicas = 1;
    std::uint64_t master_seed = 0;
    std::uint64_t sample_interval = 0;  // per-agent strategy columns every k steps; 0 = off
    unsigned threads = 0;               // 0 = EVOQ_THREADS or hardware concurrency
    std::string output = "out.csv";

    FixationSettings fixation;
    SolverSettings solver;
    AdaptiveSettings adaptive;
    SweepSettings sweep;

    // Keys that were absent from the input and filled from defaults.
    std::vector<std::string> defaulted;

    void validate() const;
    // Throws ConfigError("reward_values", ...) when no reward was configured.
    void require_reward() const;
};

// Parses and validates a JSON config. Unknown keys are rejected.
SimulationConfig config_from_json(const nlohmann::json& j);

// Reads `path` (if non-empty), applies `overrides` (dotted.key=json-value), then validates.
SimulationConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Full serialization including defaults; parse(to_json(c)) reproduces c.
nlohmann::json to_json(const SimulationConfig& config);

// Resolves threads == 0 from the EVOQ_THREADS environment variable, then hardware concurrency.
unsigned resolve_threads(unsigned requested);

} // namespace evoq
