#pragma once

#include <array>
#include <cstdint>

#include "evoq/random.hpp"

namespace evoq {

enum class Action { contribute = 0, defect = 1 };

struct LearnerParams {
    double alpha = 0.1;        // learning rate, [0, 1]
    double gamma = 0.0;        // discount rate, [0, 1)
    double temperature = 0.5;  // Boltzmann temperature, > 0

    bool valid() const;
};

// Q-values and probabilities are ordered {contribute, defect}.
using QValues = std::array<double, 2>;
using Policy = std::array<double, 2>;

struct AgentState {
    QValues q_values{0.0, 0.0};
    LearnerParams params;
    double cumulative_payoff = 0.0;
    std::uint64_t interactions = 0;
    std::uint64_t birth_step = 0;
    // Inherited marker used to follow a mutant lineage; not part of learning.
    int lineage = 0;

    double average_payoff() const {
        return interactions > 0 ? cumulative_payoff / static_cast<double>(interactions) : 0.0;
    }
};

// Softmax of Q / T, evaluated with the max subtracted.
Policy boltzmann_policy(const QValues& q, double temperature);

// Probability of contributing under the agent's current Q-values.
double contribution_probability(const AgentState& agent);

// Stateless Q-learning step: the bootstrap uses the agent's own max Q.
// Also accumulates the reward into the payoff statistics.
AgentState q_update(AgentState state, Action action, double reward);

// Consumes exactly one uniform draw.
Action sample_action(const Policy& policy, Rng& rng);

} // namespace evoq
