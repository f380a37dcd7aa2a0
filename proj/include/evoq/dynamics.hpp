#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "evoq/config.hpp"
#include "evoq/game.hpp"

namespace evoq {

// One mutant with temperature t_mutant among N-1 residents with t_resident.
// x_* are contribution probabilities.
struct StrategyPair {
    double x_mutant = 0.5;
    double x_resident = 0.5;
    double t_mutant = 1.0;
    double t_resident = 1.0;
};

struct EquilibriumResult {
    StrategyPair strategies;
    // log(x / (1 - x)) of each coordinate; exact even where x rounds to 0 or 1.
    double logit_mutant = 0.0;
    double logit_resident = 0.0;
    double residual = 0.0;              // max |dx/dt|
    double fixed_point_residual = 0.0;  // max |gain - T log(x / (1 - x))|
    bool converged = false;
    double elapsed_scaled_time = 0.0;
};

double logit(double x);
double logistic(double y);

// x (1 - x) (gain - T log(x / (1 - x))). Throws DomainError unless 0 < x < 1.
double learning_derivative(double x, double gain, double temperature);

// Gains (contribute minus defect) seen by the mutant and by a resident.
std::array<double, 2> pair_gains(double x_mutant, double x_resident, const RewardFunction& reward);

// Per-agent learning flow in units of 1/alpha:
//   dx_i/dt = x_i (1 - x_i) (gain_i / T_i - log(x_i / (1 - x_i))).
// Returns {dx_mutant/dt, dx_resident/dt}.
std::array<double, 2> pair_derivative(const StrategyPair& pair, const RewardFunction& reward);

// Integrates the pair system from `initial` until both max |dx/dt| and the
// fixed-point residual drop below settings.tolerance, or max_time elapses.
// Internally the state is the pair of logits, so the flow never reaches the
// boundary of (0, 1).
EquilibriumResult solve_equilibrium(const StrategyPair& initial, const RewardFunction& reward,
                                    const SolverSettings& settings = {});

struct PathPoint {
    double t = 0.0;
    double x_mutant = 0.5;
    double x_resident = 0.5;
};

// Flow of the pair system for `duration` (negative runs the flow backwards).
// `path` receives the initial point and every accepted step when non-null.
StrategyPair integrate_pair(const StrategyPair& initial, const RewardFunction& reward, double duration,
                            const SolverSettings& settings = {}, std::vector<PathPoint>* path = nullptr);

// focal_x (E[f(1 + K)] - 1) + (1 - focal_x) E[f(K)], K the number of
// contributing co-players.
double expected_payoff(double focal_x, std::span<const double> others, const RewardFunction& reward);

struct InvasionResult {
    double fitness = 0.0;          // E(m, r) - E(r, r)
    double mutant_payoff = 0.0;    // E(m, r)
    double resident_payoff = 0.0;  // E(r, r)
    bool converged = false;
    EquilibriumResult mutant_system;
    EquilibriumResult resident_system;
};

// Equilibrium payoff of a rare mutant minus that of a resident in a
// monomorphic group, both reached from x = 1/2.
InvasionResult invasion_fitness(double mutant_t, double resident_t, const RewardFunction& reward,
                                const SolverSettings& settings = {});

enum class Selection { positive_selection, negative_selection, attractor, unconverged };
std::string to_string(Selection s);

struct AdaptiveStep {
    double resident_t = 0.0;
    double fitness_up = 0.0;    // NaN when the upward mutant is out of bounds
    double fitness_down = 0.0;  // NaN when the downward mutant is out of bounds
    std::string decision;       // "up", "down", "stop"
};

struct AdaptiveResult {
    double final_t = 0.0;
    Selection classification = Selection::attractor;
    std::vector<AdaptiveStep> trace;
};

// Moves the resident temperature by +-step while a nearby mutant has
// positive invasion fitness, preferring the upward direction. Stops at a
// bound (positive/negative selection) or where neither direction invades.
AdaptiveResult adaptive_trajectory(double start_t, double t_min, double t_max, double step,
                                   const RewardFunction& reward, const SolverSettings& settings = {});

struct SymmetricRoot {
    double x_star = 0.5;
    double logit = 0.0;
    double residual = 0.0;  // gain(x*) - T logit(x*)
    bool reached_from_half = false;
};

// All roots of gain(x) - T log(x / (1 - x)) with every co-player at x,
// located by sign scanning (x-resolution `scan_step`) plus bisection.
std::vector<SymmetricRoot> symmetric_equilibria(const RewardFunction& reward, double temperature,
                                                double scan_step = 1e-3);

struct ManifoldPoint {
    double j0 = 0.0;
    double j1 = 0.0;
    int initial_derivative_sign = 0;  // sign of dx/dt at x = 1/2
    std::vector<SymmetricRoot> roots;
};

// Three-player games [0, j0, j0 + j1, m_max] on the grid j = m_max * i / resolution
// restricted to j0 + j1 <= m_max. Results are in grid order.
std::vector<ManifoldPoint> null_manifold(double m_max, double temperature, std::size_t resolution,
                                         unsigned threads = 1);

} // namespace evoq
