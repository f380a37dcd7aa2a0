#include "evoq/learner.hpp"

#include <algorithm>
#include <cmath>

#include "evoq/errors.hpp"

namespace evoq {

bool LearnerParams::valid() const {
    return alpha >= 0.0 && alpha <= 1.0 && gamma >= 0.0 && gamma < 1.0 &&
           temperature > 0.0 && std::isfinite(temperature);
}

Policy boltzmann_policy(const QValues& q, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("temperature must be > 0");
    if (!std::isfinite(q[0]) || !std::isfinite(q[1])) throw DomainError("Q-values must be finite");
    // Two actions: the softmax is a logistic function of the scaled gap.
    const double gap = (q[0] - q[1]) / temperature;
    if (gap >= 0.0) {
        const double e = std::exp(-gap);
        return {1.0 / (1.0 + e), e / (1.0 + e)};
    }
    const double e = std::exp(gap);
    return {e / (1.0 + e), 1.0 / (1.0 + e)};
}

double contribution_probability(const AgentState& agent) {
    return boltzmann_policy(agent.q_values, agent.params.temperature)[0];
}

AgentState q_update(AgentState state, Action action, double reward) {
    if (!std::isfinite(reward)) throw DomainError("reward must be finite");
    const auto a = static_cast<std::size_t>(action);
    const double best = std::max(state.q_values[0], state.q_values[1]);
    const double target = reward + state.params.gamma * best;
    state.q_values[a] += state.params.alpha * (target - state.q_values[a]);
    state.cumulative_payoff += reward;
    ++state.interactions;
    return state;
}

Action sample_action(const Policy& policy, Rng& rng) {
    if (!(policy[0] >= 0.0 && policy[1] >= 0.0) || std::abs(policy[0] + policy[1] - 1.0) > 1e-12) {
        throw DomainError("policy must be a probability pair summing to 1");
    }
    return uniform01(rng) < policy[0] ? Action::contribute : Action::defect;
}

} // namespace evoq
