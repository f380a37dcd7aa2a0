#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace evoq {

// Per-individual reward [f(0), ..., f(N)] indexed by the number of contributors.
// The 1/N sharing factor is already folded into the values.
class RewardFunction {
public:
    RewardFunction() = default;

    // Throws DomainError unless values.size() >= 2 and every entry is finite.
    explicit RewardFunction(std::vector<double> values);

    std::size_t group_size() const { return values_.size() - 1; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t contributors) const { return values_[contributors]; }

    // Jump minus cost: f(k+1) - 1 - f(k), for k = 0..N-1.
    double net_jump(std::size_t k) const { return values_[k + 1] - 1.0 - values_[k]; }

    bool is_monotone() const;

    friend bool operator==(const RewardFunction&, const RewardFunction&) = default;

private:
    std::vector<double> values_;
};

// One 0/1 contribution per group member.
using ActionProfile = std::vector<int>;

// Three-player reward of the form [0, j0, j0 + j1, m_max].
struct RewardSpacePoint {
    double j0 = 0.0;
    double j1 = 0.0;
    double m_max = 1.0;

    bool valid() const;
};

// f(i) = k * i for i = 0..n.
RewardFunction linear_reward(double k, std::size_t n);

RewardFunction reward_from_jumps(const RewardSpacePoint& point);

// payoff_j = f(total contributors) - c_j.
std::vector<double> payoffs(const ActionProfile& profile, const RewardFunction& reward);

// Distribution of the number of successes among independent Bernoulli trials
// with the given probabilities. Result has probs.size() + 1 entries.
std::vector<double> contributor_distribution(std::span<const double> probs);

// Success probability carried together with its complement, so that a
// probability within rounding of 0 or 1 keeps full relative precision on
// the small side.
struct Bernoulli {
    double p = 0.5;
    double q = 0.5;

    static Bernoulli from_probability(double p) { return {p, 1.0 - p}; }
};

std::vector<double> contributor_distribution(std::span<const Bernoulli> trials);

// Expected payoff difference between contributing and defecting when the
// co-players contribute independently with `other_probs`
// (length group_size - 1).
double expected_gain(std::span<const double> other_probs, const RewardFunction& reward);

} // namespace evoq
