#include "evoq/game.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "evoq/errors.hpp"

namespace evoq {

RewardFunction::RewardFunction(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw DomainError("reward function needs at least two values (group size >= 1)");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DomainError("reward value at index " + std::to_string(i) + " is not finite");
        }
    }
}

bool RewardFunction::is_monotone() const {
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        if (values_[i + 1] < values_[i]) return false;
    }
    return true;
}

bool RewardSpacePoint::valid() const {
    return std::isfinite(j0) && std::isfinite(j1) && std::isfinite(m_max) && m_max > 0.0 &&
           j0 >= 0.0 && j0 <= m_max && j1 >= 0.0 && j1 <= m_max - j0;
}

RewardFunction linear_reward(double k, std::size_t n) {
    if (n < 2) throw DomainError("invalid group size: need n >= 2");
    if (!std::isfinite(k)) throw DomainError("linear reward slope must be finite");
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = k * static_cast<double>(i);
    return RewardFunction(std::move(values));
}

RewardFunction reward_from_jumps(const RewardSpacePoint& point) {
    if (!point.valid()) {
        throw DomainError("reward-space point violates 0 <= j0 <= m, 0 <= j1 <= m - j0");
    }
    return RewardFunction({0.0, point.j0, point.j0 + point.j1, point.m_max});
}

std::vector<double> payoffs(const ActionProfile& profile, const RewardFunction& reward) {
    if (profile.size() != reward.group_size()) {
        throw DomainError("action profile length " + std::to_string(profile.size()) +
                          " does not match group size " + std::to_string(reward.group_size()));
    }
    std::size_t total = 0;
    for (int c : profile) {
        if (c != 0 && c != 1) throw DomainError("contributions must be 0 or 1");
        total += static_cast<std::size_t>(c);
    }
    const double shared = reward[total];
    std::vector<double> out(profile.size());
    for (std::size_t j = 0; j < profile.size(); ++j) out[j] = shared - profile[j];
    return out;
}

std::vector<double> contributor_distribution(std::span<const double> probs) {
    std::vector<double> dist(probs.size() + 1, 0.0);
    dist[0] = 1.0;
    std::size_t seen = 0;
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]");
        ++seen;
        // backwards so dist[k-1] still holds the previous row
        for (std::size_t k = seen; k > 0; --k) {
            dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
        }
        dist[0] *= (1.0 - p);
    }
    return dist;
}

std::vector<double> contributor_distribution(std::span<const Bernoulli> trials) {
    std::vector<double> dist(trials.size() + 1, 0.0);
    dist[0] = 1.0;
    std::size_t seen = 0;
    for (const auto& b : trials) {
        if (!(b.p >= 0.0 && b.p <= 1.0 && b.q >= 0.0 && b.q <= 1.0)) {
            throw DomainError("probability outside [0, 1]");
        }
        ++seen;
        for (std::size_t k = seen; k > 0; --k) dist[k] = dist[k] * b.q + dist[k - 1] * b.p;
        dist[0] *= b.q;
    }
    return dist;
}

double expected_gain(std::span<const double> other_probs, const RewardFunction& reward) {
    if (other_probs.size() + 1 != reward.group_size()) {
        throw DomainError("expected_gain needs group_size - 1 co-player probabilities");
    }
    const auto dist = contributor_distribution(other_probs);
    double gain = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) gain += dist[k] * reward.net_jump(k);
    return gain;
}

} // namespace evoq
