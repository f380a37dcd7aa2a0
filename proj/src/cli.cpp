#include "evoq/cli.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "evoq/dynamics.hpp"
#include "evoq/errors.hpp"
#include "evoq/evolution.hpp"
#include "evoq/experiments.hpp"
#include "evoq/output.hpp"

namespace evoq {

using nlohmann::json;

namespace {

const std::vector<double> kFig1Reward{0, 0, 0, 2, 4, 6};

json base_metadata(const std::string& command, const SimulationConfig& c) {
    json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    meta["master_seed"] = c.master_seed;
    meta["config"] = to_json(c);
    meta["defaults_applied"] = c.defaulted;
    meta["assumptions"] = json::array();
    meta["outputs"] = {c.output};
    return meta;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

int cmd_simulate(const SimulationConfig& c) {
    c.require_reward();
    json meta = base_metadata("simulate", c);
    meta["outputs"] = json::array();
    for (std::uint64_t rep = 0; rep < c.replicas; ++rep) {
        // replica 0 uses master_seed itself so single runs are easy to reproduce
        const std::uint64_t seed = rep == 0 ? c.master_seed : derive_seed(c.master_seed, {0x5117, rep});
        const std::string path = c.replicas == 1 ? c.output : with_suffix(c.output, "_r" + std::to_string(rep));
        const auto traj = run_simulation(c, seed);
        std::vector<std::string> header{"step", "mean_strategy", "mean_temperature", "empirical_contribution"};
        if (c.sample_interval > 0) {
            for (std::size_t i = 0; i < c.group_size; ++i) header.push_back("agent_" + std::to_string(i));
        }
        CsvWriter csv(path, header);
        for (const auto& row : traj.rows) {
            csv.cell(row.step).cell(row.mean_strategy).cell(row.mean_temperature).cell(row.empirical_contribution);
            if (c.sample_interval > 0) {
                for (std::size_t i = 0; i < c.group_size; ++i) {
                    if (row.agent_strategies) {
                        csv.cell((*row.agent_strategies)[i]);
                    } else {
                        csv.empty();
                    }
                }
            }
            csv.end_row();
        }
        meta["outputs"].push_back(path);
        meta["replica_seeds"].push_back(seed);
    }
    write_metadata(c.output, meta);
    return kExitOk;
}

int cmd_fixation(const SimulationConfig& c) {
    c.require_reward();
    const auto est = estimate_fixation(c.learner.temperature, c.fixation.mutant_temperature, c,
                                       c.fixation.trials, resolve_threads(c.threads));
    CsvWriter csv(c.output,
                  {"resident_T", "mutant_T", "trials", "fixations", "extinctions", "censored", "p_hat", "se"});
    csv.cell(est.resident_temperature)
        .cell(est.mutant_temperature)
        .cell(est.trials)
        .cell(est.fixations)
        .cell(est.extinctions)
        .cell(est.censored)
        .cell(est.probability)
        .cell(est.standard_error);
    csv.end_row();
    json meta = base_metadata("fixation", c);
    if (c.evolution.mutation_prob > 0.0) {
        meta["assumptions"].push_back("mutation_prob forced to 0 during fixation trials");
    }
    write_metadata(c.output, meta);
    std::cout << "p_hat=" << format_double(est.probability) << " se=" << format_double(est.standard_error)
              << " censored=" << est.censored << '\n';
    return kExitOk;
}

int cmd_equilibrium(const SimulationConfig& c) {
    c.require_reward();
    const StrategyPair start{0.5, 0.5, c.adaptive.mutant_temperature, c.learner.temperature};
    const auto eq = solve_equilibrium(start, c.reward, c.solver);
    CsvWriter csv(c.output, {"t_mutant", "t_resident", "x_mutant", "x_resident", "logit_mutant", "logit_resident",
                             "residual", "fixed_point_residual", "converged", "elapsed_scaled_time"});
    csv.cell(start.t_mutant)
        .cell(start.t_resident)
        .cell(eq.strategies.x_mutant)
        .cell(eq.strategies.x_resident)
        .cell(eq.logit_mutant)
        .cell(eq.logit_resident)
        .cell(eq.residual)
        .cell(eq.fixed_point_residual)
        .cell(eq.converged ? 1 : 0)
        .cell(eq.elapsed_scaled_time);
    csv.end_row();
    write_metadata(c.output, base_metadata("ode-equilibrium", c));
    return eq.converged ? kExitOk : kExitNotConverged;
}

int cmd_invasion(const SimulationConfig& c) {
    c.require_reward();
    const auto inv = invasion_fitness(c.adaptive.mutant_temperature, c.learner.temperature, c.reward, c.solver);
    CsvWriter csv(c.output, {"mutant_T", "resident_T", "fitness", "mutant_payoff", "resident_payoff", "converged"});
    csv.cell(c.adaptive.mutant_temperature)
        .cell(c.learner.temperature)
        .cell(inv.fitness)
        .cell(inv.mutant_payoff)
        .cell(inv.resident_payoff)
        .cell(inv.converged ? 1 : 0);
    csv.end_row();
    write_metadata(c.output, base_metadata("invasion", c));
    return inv.converged ? kExitOk : kExitNotConverged;
}

int cmd_adaptive(const SimulationConfig& c) {
    c.require_reward();
    const auto& a = c.adaptive;
    const auto res = adaptive_trajectory(a.start_temperature, a.temperature_min, a.temperature_max, a.step, c.reward,
                                         c.solver);
    CsvWriter csv(c.output, {"resident_T", "fitness_up", "fitness_down", "decision"});
    for (const auto& s : res.trace) {
        csv.cell(s.resident_t).cell(s.fitness_up).cell(s.fitness_down).cell(s.decision);
        csv.end_row();
    }
    json meta = base_metadata("adaptive", c);
    meta["summary"] = {{"final_T", res.final_t}, {"classification", to_string(res.classification)}};
    write_metadata(c.output, meta);
    std::cout << "final_T=" << format_double(res.final_t) << " classification=" << to_string(res.classification)
              << '\n';
    return res.classification == Selection::unconverged ? kExitNotConverged : kExitOk;
}

void write_sweep(const SimulationConfig& c, const SweepResult& sweep, const std::string& command,
                 const json& assumptions) {
    std::vector<std::string> header;
    for (const auto& p : sweep.cells.front().params) header.push_back(p.first);
    for (const char* h : {"replicas", "iterations", "mean_strategy", "sd", "se", "se_defined", "mean_empirical",
                          "mean_temperature", "mean_agent_sd"}) {
        header.emplace_back(h);
    }
    CsvWriter csv(c.output, header);
    for (const auto& s : sweep.cells) {
        for (const auto& p : s.params) csv.cell(p.second);
        csv.cell(static_cast<std::uint64_t>(s.replicas))
            .cell(c.iterations)
            .cell(s.mean)
            .cell(s.sd)
            .cell(s.se)
            .cell(s.se_defined ? 1 : 0)
            .cell(s.mean_empirical)
            .cell(s.mean_temperature)
            .cell(s.mean_agent_sd);
        csv.end_row();
    }
    json meta = base_metadata(command, c);
    for (const auto& a : assumptions) meta["assumptions"].push_back(a);
    meta["warnings"] = sweep.warnings;
    write_metadata(c.output, meta);
    for (const auto& w : sweep.warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_sweep_learning(const SimulationConfig& c) {
    const auto alphas = c.sweep.alphas.empty() ? default_alpha_grid() : c.sweep.alphas;
    const auto gammas = c.sweep.gammas.empty() ? default_gamma_grid() : c.sweep.gammas;
    const auto sweep = sweep_learning_params(alphas, gammas, c, resolve_threads(c.threads));
    json assumptions = json::array();
    if (c.evolution.replacement_rate != 0.0) assumptions.push_back("replacement_rate forced to 0");
    write_sweep(c, sweep, "sweep-learning", assumptions);
    return kExitOk;
}

int cmd_sweep_temperature(SimulationConfig c) {
    json assumptions = json::array();
    if (!c.has_reward) {
        c.reward = RewardFunction(kFig1Reward);
        c.group_size = c.reward.group_size();
        c.has_reward = true;
        assumptions.push_back("reward not given; defaulted to [0, 0, 0, 2, 4, 6]");
    }
    if (c.evolution.mutation_prob != 0.0) assumptions.push_back("mutation_prob forced to 0");
    const std::vector<double> temps =
        c.sweep.temperatures.empty() ? std::vector<double>{0.1, 0.25, 0.5, 1.0, 2.0, 10.0} : c.sweep.temperatures;
    const std::vector<double> rates = c.sweep.replacement_rates.empty() ? std::vector<double>{0.0, 0.01, 0.05, 0.1}
                                                                        : c.sweep.replacement_rates;
    const auto sweep = sweep_temperature_replacement(temps, rates, c, resolve_threads(c.threads));
    write_sweep(c, sweep, "sweep-temp-replacement", assumptions);
    return kExitOk;
}

int cmd_sweep_reward(const SimulationConfig& c) {
    const auto cells = sweep_reward_space(c.sweep.m_max, c.sweep.resolution, c.adaptive, c.solver,
                                          resolve_threads(c.threads));
    CsvWriter csv(c.output, {"m_max", "j0", "j1", "final_T", "classification", "steps"});
    bool all_converged = true;
    for (const auto& cell : cells) {
        csv.cell(c.sweep.m_max)
            .cell(cell.j0)
            .cell(cell.j1)
            .cell(cell.outcome.final_t)
            .cell(to_string(cell.outcome.classification))
            .cell(static_cast<std::uint64_t>(cell.outcome.trace.size()));
        csv.end_row();
        all_converged = all_converged && cell.outcome.classification != Selection::unconverged;
    }
    write_metadata(c.output, base_metadata("sweep-reward-space", c));
    return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_manifold(const SimulationConfig& c) {
    const auto points =
        null_manifold(c.sweep.m_max, c.learner.temperature, c.sweep.resolution, resolve_threads(c.threads));
    CsvWriter csv(c.output, {"j0", "j1", "root_index", "x_star", "initial_derivative_sign", "logit_x_star",
                             "residual", "reached_from_half"});
    for (const auto& p : points) {
        for (std::size_t k = 0; k < p.roots.size(); ++k) {
            const auto& r = p.roots[k];
            csv.cell(p.j0)
                .cell(p.j1)
                .cell(static_cast<std::uint64_t>(k))
                .cell(r.x_star)
                .cell(p.initial_derivative_sign)
                .cell(r.logit)
                .cell(r.residual)
                .cell(r.reached_from_half ? 1 : 0);
            csv.end_row();
        }
    }
    write_metadata(c.output, base_metadata("manifold", c));
    return kExitOk;
}

} // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"simulate",     "fixation",       "ode-equilibrium",
                                                "invasion",     "adaptive",       "sweep-learning",
                                                "sweep-temp-replacement",         "sweep-reward-space",
                                                "manifold"};
    return names;
}

int dispatch(const std::string& subcommand, const SimulationConfig& config) {
    try {
        if (subcommand == "simulate") return cmd_simulate(config);
        if (subcommand == "fixation") return cmd_fixation(config);
        if (subcommand == "ode-equilibrium") return cmd_equilibrium(config);
        if (subcommand == "invasion") return cmd_invasion(config);
        if (subcommand == "adaptive") return cmd_adaptive(config);
        if (subcommand == "sweep-learning") return cmd_sweep_learning(config);
        if (subcommand == "sweep-temp-replacement") return cmd_sweep_temperature(config);
        if (subcommand == "sweep-reward-space") return cmd_sweep_reward(config);
        if (subcommand == "manifold") return cmd_manifold(config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const ConvergenceError& e) {
        std::cerr << "not converged: " << e.what() << '\n';
        return kExitNotConverged;
    }
    std::cerr << "unknown subcommand '" << subcommand << "'\n";
    return kExitUsage;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Evolutionary Q-learning in public goods games"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<unsigned> threads;

    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "JSON config file");
        sub->add_option("-s,--set", overrides, "Override a config value: key=value (dotted keys for sections)");
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("-o,--output", output, "Output CSV path");
        sub->add_option("-j,--threads", threads, "Worker threads (default: EVOQ_THREADS or all cores)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    if (seed) overrides.push_back("master_seed=" + std::to_string(*seed));
    if (threads) overrides.push_back("threads=" + std::to_string(*threads));
    if (output) overrides.push_back("output=" + json(*output).dump());

    SimulationConfig config;
    try {
        config = parse_config(config_path, overrides);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
    try {
        return dispatch(name, config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

} // namespace evoq
