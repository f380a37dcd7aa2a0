#include "evoq/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "evoq/errors.hpp"
#include "evoq/evolution.hpp"
#include "evoq/parallel.hpp"
#include "evoq/random.hpp"

namespace evoq {

namespace {

constexpr std::uint64_t kLearningTag = 0x1ea2;
constexpr std::uint64_t kTemperatureTag = 0x7e3b;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

RunRecord run_replica(const SimulationConfig& config, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto traj = run_simulation(config, seed);
    RunRecord rec;
    rec.seed = seed;
    const auto& last = traj.rows.back();
    rec.final_mean_strategy = last.mean_strategy;
    rec.final_empirical_contribution = last.empirical_contribution;
    rec.mean_temperature = last.mean_temperature;
    double acc = 0.0;
    for (const auto& row : traj.rows) acc += row.mean_strategy;
    rec.time_mean_strategy = acc / static_cast<double>(traj.rows.size());
    double ss = 0.0;
    for (double x : traj.final_strategies) ss += (x - last.mean_strategy) * (x - last.mean_strategy);
    rec.final_strategy_sd = std::sqrt(ss / static_cast<double>(traj.final_strategies.size()));
    rec.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

SweepResult two_axis_sweep(const std::vector<double>& a_values, const std::vector<double>& b_values,
                           const std::string& a_name, const std::string& b_name, const SimulationConfig& config,
                           std::uint64_t tag, unsigned threads, void (*apply)(SimulationConfig&, double, double)) {
    if (a_values.empty() || b_values.empty()) throw ConfigError("sweep", "axes must be non-empty");
    std::vector<std::pair<ParamList, SimulationConfig>> cells;
    for (double a : a_values) {
        for (double b : b_values) {
            SimulationConfig c = config;
            apply(c, a, b);
            c.validate();
            cells.push_back({{{a_name, a}, {b_name, b}}, std::move(c)});
        }
    }
    SweepResult out;
    out.records = run_cells(cells, config.replicas, config.master_seed, tag, threads);
    out.cells = aggregate(out.records);
    if (config.replicas == 1) {
        out.warnings.push_back("replicas == 1: standard errors are undefined and reported as 0");
    }
    return out;
}

} // namespace

std::vector<CellSummary> aggregate(std::vector<RunRecord> records) {
    if (records.empty()) throw DomainError("aggregate needs at least one record");
    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return a.cell != b.cell ? a.cell < b.cell : a.replica < b.replica;
    });
    std::vector<CellSummary> out;
    std::size_t begin = 0;
    while (begin < records.size()) {
        std::size_t end = begin;
        while (end < records.size() && records[end].cell == records[begin].cell) ++end;
        CellSummary s;
        s.cell = records[begin].cell;
        s.params = records[begin].params;
        s.replicas = end - begin;
        const double n = static_cast<double>(s.replicas);
        for (std::size_t i = begin; i < end; ++i) {
            s.mean += records[i].final_mean_strategy;
            s.mean_empirical += records[i].final_empirical_contribution;
            s.mean_temperature += records[i].mean_temperature;
            s.mean_agent_sd += records[i].final_strategy_sd;
        }
        s.mean /= n;
        s.mean_empirical /= n;
        s.mean_temperature /= n;
        s.mean_agent_sd /= n;
        if (s.replicas > 1) {
            double ss = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const double d = records[i].final_mean_strategy - s.mean;
                ss += d * d;
            }
            s.sd = std::sqrt(ss / (n - 1.0));
            s.se = s.sd / std::sqrt(n);
            s.se_defined = true;
        }
        out.push_back(std::move(s));
        begin = end;
    }
    return out;
}

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t tag, std::size_t i, std::size_t j,
                           std::uint64_t replica) {
    return derive_seed(master, {tag, i, j, replica});
}

std::vector<RunRecord> run_cells(const std::vector<std::pair<ParamList, SimulationConfig>>& cells,
                                 std::uint64_t replicas, std::uint64_t master_seed, std::uint64_t tag,
                                 unsigned threads) {
    if (replicas == 0) throw ConfigError("replicas", "must be ≥ 1");
    std::vector<RunRecord> records(cells.size() * replicas);
    parallel_for(records.size(), threads, [&](std::size_t k) {
        const std::size_t cell = k / replicas;
        const std::uint64_t rep = k % replicas;
        auto rec = run_replica(cells[cell].second, replica_seed(master_seed, tag, cell, 0, rep));
        rec.cell = cell;
        rec.params = cells[cell].first;
        rec.replica = rep;
        records[k] = std::move(rec);
    });
    return records;
}

std::vector<double> default_alpha_grid() { return linspace(0.0, 1.0, 10); }

std::vector<double> default_gamma_grid() { return linspace(0.0, 0.9, 10); }

SweepResult sweep_learning_params(const std::vector<double>& alphas, const std::vector<double>& gammas,
                                  SimulationConfig config, unsigned threads) {
    config.require_reward();
    config.evolution.replacement_rate = 0.0;
    return two_axis_sweep(alphas, gammas, "alpha", "gamma", config, kLearningTag, threads,
                          [](SimulationConfig& c, double a, double g) {
                              c.learner.alpha = a;
                              c.learner.gamma = g;
                          });
}

SweepResult sweep_temperature_replacement(const std::vector<double>& temperatures,
                                          const std::vector<double>& replacement_rates, SimulationConfig config,
                                          unsigned threads) {
    config.require_reward();
    config.evolution.mutation_prob = 0.0;
    return two_axis_sweep(temperatures, replacement_rates, "temperature", "replacement_rate", config,
                          kTemperatureTag, threads, [](SimulationConfig& c, double t, double r) {
                              c.learner.temperature = t;
                              c.evolution.replacement_rate = r;
                          });
}

std::vector<RewardCell> sweep_reward_space(double m_max, std::size_t resolution, const AdaptiveSettings& adaptive,
                                           const SolverSettings& solver, unsigned threads) {
    if (!(m_max > 0.0)) throw ConfigError("sweep.m_max", "must be > 0");
    if (resolution == 0) throw ConfigError("sweep.resolution", "must be ≥ 1");
    std::vector<std::pair<std::size_t, std::size_t>> grid;
    for (std::size_t i = 0; i <= resolution; ++i) {
        for (std::size_t j = 0; i + j <= resolution; ++j) grid.emplace_back(i, j);
    }
    std::vector<RewardCell> out(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t c) {
        const double res = static_cast<double>(resolution);
        auto& cell = out[c];
        cell.j0 = m_max * static_cast<double>(grid[c].first) / res;
        cell.j1 = std::min(m_max * static_cast<double>(grid[c].second) / res, m_max - cell.j0);
        const auto reward = reward_from_jumps({cell.j0, cell.j1, m_max});
        cell.outcome = adaptive_trajectory(adaptive.start_temperature, adaptive.temperature_min,
                                           adaptive.temperature_max, adaptive.step, reward, solver);
    });
    return out;
}

} // namespace evoq
