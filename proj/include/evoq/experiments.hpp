#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evoq/config.hpp"
#include "evoq/dynamics.hpp"

namespace evoq {

using ParamList = std::vector<std::pair<std::string, double>>;

// One replica of one sweep cell.
struct RunRecord {
    std::size_t cell = 0;
    ParamList params;
    std::uint64_t replica = 0;
    std::uint64_t seed = 0;
    double final_mean_strategy = 0.0;       // mean Boltzmann contribution probability
    double time_mean_strategy = 0.0;        // average of the per-step mean over the run
    double final_empirical_contribution = 0.0;
    double final_strategy_sd = 0.0;         // spread across agents at the end
    double mean_temperature = 0.0;
    double runtime_seconds = 0.0;           // wall clock; never written to CSV
};

struct CellSummary {
    std::size_t cell = 0;
    ParamList params;
    std::size_t replicas = 0;
    double mean = 0.0;
    double sd = 0.0;   // sample standard deviation (n - 1)
    double se = 0.0;   // sd / sqrt(n); 0 when n == 1
    bool se_defined = false;
    double mean_empirical = 0.0;
    double mean_temperature = 0.0;
    double mean_agent_sd = 0.0;
};

// Per-cell statistics of final_mean_strategy. The result is sorted by cell
// and does not depend on the order of `records`. Throws DomainError if empty.
std::vector<CellSummary> aggregate(std::vector<RunRecord> records);

// Seed of replica `replica` in cell (i, j) of a sweep identified by `tag`.
std::uint64_t replica_seed(std::uint64_t master, std::uint64_t tag, std::size_t i, std::size_t j,
                           std::uint64_t replica);

// Runs config.replicas replicas of each (params, config) cell in parallel.
std::vector<RunRecord> run_cells(const std::vector<std::pair<ParamList, SimulationConfig>>& cells,
                                 std::uint64_t replicas, std::uint64_t master_seed, std::uint64_t tag,
                                 unsigned threads);

struct SweepResult {
    std::vector<CellSummary> cells;
    std::vector<RunRecord> records;
    std::vector<std::string> warnings;
};

// Default axes: alpha = 0, 1/9, ..., 1 and gamma = 0, 0.1, ..., 0.9.
std::vector<double> default_alpha_grid();
std::vector<double> default_gamma_grid();

// Mean final contribution probability over replicas for each (alpha, gamma),
// with no replacement. Cells are alpha-major.
SweepResult sweep_learning_params(const std::vector<double>& alphas, const std::vector<double>& gammas,
                                  SimulationConfig config, unsigned threads);

// Mean +- standard error of final contribution for each (temperature,
// replacement rate), with temperature mutation disabled. Cells are
// temperature-major.
SweepResult sweep_temperature_replacement(const std::vector<double>& temperatures,
                                          const std::vector<double>& replacement_rates, SimulationConfig config,
                                          unsigned threads);

struct RewardCell {
    double j0 = 0.0;
    double j1 = 0.0;
    AdaptiveResult outcome;
};

// Adaptive temperature trajectory for every [0, j0, j0 + j1, m_max] on the
// lower-triangle grid j = m_max * i / resolution. Cells in grid order.
std::vector<RewardCell> sweep_reward_space(double m_max, std::size_t resolution, const AdaptiveSettings& adaptive,
                                           const SolverSettings& solver, unsigned threads);

} // namespace evoq
