#include "evoq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "evoq/errors.hpp"
#include "evoq/ode.hpp"
#include "evoq/parallel.hpp"

namespace evoq {

namespace {

using Logits = std::array<double, 2>;

Bernoulli from_logit(double y) { return {logistic(y), logistic(-y)}; }

double gain_of(std::span<const Bernoulli> others, const RewardFunction& reward) {
    const auto dist = contributor_distribution(others);
    double g = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) g += dist[k] * reward.net_jump(k);
    return g;
}

std::array<double, 2> gains_from(const Bernoulli& mutant, const Bernoulli& resident, const RewardFunction& reward) {
    const std::size_t n = reward.group_size();
    std::vector<Bernoulli> others(n - 1, resident);
    const double g_mutant = gain_of(others, reward);
    others[0] = mutant;
    const double g_resident = gain_of(others, reward);
    return {g_mutant, g_resident};
}

// d(logit x_i)/dt = gain_i / T_i - logit x_i
Logits logit_rhs(const Logits& y, const StrategyPair& pair, const RewardFunction& reward) {
    const auto g = gains_from(from_logit(y[0]), from_logit(y[1]), reward);
    return {g[0] / pair.t_mutant - y[0], g[1] / pair.t_resident - y[1]};
}

double fixed_point_residual(const Logits& f, const StrategyPair& pair) {
    return std::max(std::abs(pair.t_mutant * f[0]), std::abs(pair.t_resident * f[1]));
}

// Newton refinement of an equilibrium of the logit flow starting near `y`.
// Succeeds only for a nearby, linearly stable fixed point, so the refined
// point is the one the trajectory was approaching.
bool polish_equilibrium(Logits& y, const StrategyPair& pair, const RewardFunction& reward, double tolerance) {
    const auto F = [&](const Logits& v) { return logit_rhs(v, pair, reward); };
    const Logits start = y;
    Logits v = y;
    for (int it = 0; it < 30; ++it) {
        const Logits f = F(v);
        std::array<std::array<double, 2>, 2> J{};
        for (std::size_t j = 0; j < 2; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(v[j]));
            Logits hi = v, lo = v;
            hi[j] += h;
            lo[j] -= h;
            const Logits fh = F(hi), fl = F(lo);
            for (std::size_t i = 0; i < 2; ++i) J[i][j] = (fh[i] - fl[i]) / (2.0 * h);
        }
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (fixed_point_residual(f, pair) < 0.1 * tolerance) {
            const double trace = J[0][0] + J[1][1];
            if (!(trace < 0.0 && det > 0.0)) return false;
            if (std::max(std::abs(v[0] - start[0]), std::abs(v[1] - start[1])) > 1e-3 * (1.0 + std::abs(start[0]) + std::abs(start[1]))) {
                return false;
            }
            y = v;
            return true;
        }
        if (det == 0.0 || !std::isfinite(det)) return false;
        v[0] -= (J[1][1] * f[0] - J[0][1] * f[1]) / det;
        v[1] -= (J[0][0] * f[1] - J[1][0] * f[0]) / det;
        if (!std::isfinite(v[0]) || !std::isfinite(v[1])) return false;
    }
    return false;
}

void check_pair(const StrategyPair& pair, const RewardFunction& reward) {
    if (reward.group_size() < 2) throw DomainError("pair system needs group size >= 2");
    if (!(pair.t_mutant > 0.0) || !(pair.t_resident > 0.0)) throw DomainError("temperatures must be > 0");
    if (!(pair.x_mutant > 0.0 && pair.x_mutant < 1.0 && pair.x_resident > 0.0 && pair.x_resident < 1.0)) {
        throw DomainError("strategies must lie strictly inside (0, 1)");
    }
}

DormandPrince<2> make_integrator(const SolverSettings& s) {
    DormandPrince<2> dp;
    dp.rtol = s.rtol;
    dp.atol = s.atol;
    dp.max_steps = s.max_steps;
    return dp;
}

// Payoff relative to `baseline`: focal.p (E[f(1+K)] - 1 - b) + focal.q (E[f(K)] - b).
// With the baseline at the dominant pure profile, the near-certain term is
// exactly zero and the remaining terms keep their relative precision.
double payoff_excess(const Bernoulli& focal, std::span<const Bernoulli> others, const RewardFunction& reward,
                     double baseline) {
    const auto dist = contributor_distribution(others);
    double c = 0.0, d = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        c += dist[k] * (reward[k + 1] - 1.0 - baseline);
        d += dist[k] * (reward[k] - baseline);
    }
    return focal.p * c + focal.q * d;
}

// Lazily computed monomorphic systems for a fixed reward, keyed by temperature.
class ResidentCache {
public:
    ResidentCache(const RewardFunction& reward, const SolverSettings& settings)
        : reward_(reward), settings_(settings) {}

    const EquilibriumResult& get(double t) {
        auto it = cache_.find(t);
        if (it == cache_.end()) {
            it = cache_.emplace(t, solve_equilibrium({0.5, 0.5, t, t}, reward_, settings_)).first;
        }
        return it->second;
    }

private:
    const RewardFunction& reward_;
    const SolverSettings& settings_;
    std::map<double, EquilibriumResult> cache_;
};

InvasionResult invasion_against(double mutant_t, const EquilibriumResult& resident_sys,
                                const RewardFunction& reward, const SolverSettings& settings) {
    const double resident_t = resident_sys.strategies.t_resident;
    InvasionResult out;
    out.resident_system = resident_sys;
    out.mutant_system = mutant_t == resident_t ? resident_sys
                                                : solve_equilibrium({0.5, 0.5, mutant_t, resident_t}, reward, settings);
    out.converged = out.mutant_system.converged && out.resident_system.converged;

    const std::size_t n = reward.group_size();
    const double baseline = resident_sys.logit_resident >= 0.0 ? reward[n] - 1.0 : reward[0];

    const Bernoulli res = from_logit(resident_sys.logit_resident);
    std::vector<Bernoulli> others(n - 1, res);
    const double e_rr = payoff_excess(res, others, reward, baseline);

    // Identical temperatures: the mutant is a resident, so reuse E(r, r)
    // rather than let rounding in the two coordinates leave a spurious sign.
    double e_mr = e_rr;
    if (mutant_t != resident_t) {
        const Bernoulli mut = from_logit(out.mutant_system.logit_mutant);
        std::fill(others.begin(), others.end(), from_logit(out.mutant_system.logit_resident));
        e_mr = payoff_excess(mut, others, reward, baseline);
    }

    out.fitness = e_mr - e_rr;
    out.mutant_payoff = baseline + e_mr;
    out.resident_payoff = baseline + e_rr;
    return out;
}

} // namespace

double logit(double x) { return std::log(x) - std::log1p(-x); }

double logistic(double y) {
    if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
    const double e = std::exp(y);
    return e / (1.0 + e);
}

double learning_derivative(double x, double gain, double temperature) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("strategy must lie strictly inside (0, 1)");
    if (!(temperature > 0.0)) throw DomainError("temperature must be > 0");
    return x * (1.0 - x) * (gain - temperature * logit(x));
}

std::array<double, 2> pair_gains(double x_mutant, double x_resident, const RewardFunction& reward) {
    if (reward.group_size() < 2) throw DomainError("pair system needs group size >= 2");
    if (!(x_mutant >= 0.0 && x_mutant <= 1.0 && x_resident >= 0.0 && x_resident <= 1.0)) {
        throw DomainError("probability outside [0, 1]");
    }
    return gains_from(Bernoulli::from_probability(x_mutant), Bernoulli::from_probability(x_resident), reward);
}

std::array<double, 2> pair_derivative(const StrategyPair& pair, const RewardFunction& reward) {
    check_pair(pair, reward);
    const auto g = pair_gains(pair.x_mutant, pair.x_resident, reward);
    return {learning_derivative(pair.x_mutant, g[0] / pair.t_mutant, 1.0),
            learning_derivative(pair.x_resident, g[1] / pair.t_resident, 1.0)};
}

EquilibriumResult solve_equilibrium(const StrategyPair& initial, const RewardFunction& reward,
                                    const SolverSettings& settings) {
    check_pair(initial, reward);
    if (!(settings.tolerance > 0.0)) throw DomainError("tolerance must be > 0");

    EquilibriumResult result;
    const auto rhs = [&](double, const Logits& y) { return logit_rhs(y, initial, reward); };
    const auto record = [&](double t, const Logits& y, const Logits& dy) {
        double dx_max = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const auto b = from_logit(y[i]);
            dx_max = std::max(dx_max, std::abs(b.p * b.q * dy[i]));
        }
        result.logit_mutant = y[0];
        result.logit_resident = y[1];
        result.residual = dx_max;
        result.fixed_point_residual = fixed_point_residual(dy, initial);
        result.elapsed_scaled_time = t;
        result.converged = dx_max < settings.tolerance && result.fixed_point_residual < settings.tolerance;
        return result.converged;
    };
    // Near an equilibrium an explicit scheme can stall at the atol level, so
    // once the residual is small the fixed point is refined by Newton steps.
    double last_polish = std::numeric_limits<double>::infinity();
    const auto observe = [&](double t, const Logits& y, const Logits& dy) {
        if (record(t, y, dy)) return true;
        const double fp = result.fixed_point_residual;
        if (fp < 1e-4 && fp < 0.1 * last_polish) {
            last_polish = fp;
            Logits refined = y;
            if (polish_equilibrium(refined, initial, reward, settings.tolerance)) {
                return record(t, refined, logit_rhs(refined, initial, reward));
            }
        }
        return false;
    };

    Logits y{logit(initial.x_mutant), logit(initial.x_resident)};
    make_integrator(settings).integrate(rhs, 0.0, y, settings.max_time, observe);

    result.strategies = initial;
    result.strategies.x_mutant = logistic(result.logit_mutant);
    result.strategies.x_resident = logistic(result.logit_resident);
    return result;
}

StrategyPair integrate_pair(const StrategyPair& initial, const RewardFunction& reward, double duration,
                            const SolverSettings& settings, std::vector<PathPoint>* path) {
    check_pair(initial, reward);
    const auto rhs = [&](double, const Logits& y) { return logit_rhs(y, initial, reward); };
    const auto observe = [&](double t, const Logits& y, const Logits&) {
        if (path) path->push_back({t, logistic(y[0]), logistic(y[1])});
        return false;
    };
    Logits y{logit(initial.x_mutant), logit(initial.x_resident)};
    make_integrator(settings).integrate(rhs, 0.0, y, duration, observe);
    StrategyPair out = initial;
    out.x_mutant = logistic(y[0]);
    out.x_resident = logistic(y[1]);
    return out;
}

double expected_payoff(double focal_x, std::span<const double> others, const RewardFunction& reward) {
    if (others.size() + 1 != reward.group_size()) {
        throw DomainError("expected_payoff needs group_size - 1 co-player probabilities");
    }
    if (!(focal_x >= 0.0 && focal_x <= 1.0)) throw DomainError("probability outside [0, 1]");
    std::vector<Bernoulli> b;
    b.reserve(others.size());
    for (double p : others) b.push_back(Bernoulli::from_probability(p));
    return payoff_excess(Bernoulli::from_probability(focal_x), b, reward, 0.0);
}

InvasionResult invasion_fitness(double mutant_t, double resident_t, const RewardFunction& reward,
                                const SolverSettings& settings) {
    if (!(mutant_t > 0.0) || !(resident_t > 0.0)) throw DomainError("temperatures must be > 0");
    const auto resident = solve_equilibrium({0.5, 0.5, resident_t, resident_t}, reward, settings);
    return invasion_against(mutant_t, resident, reward, settings);
}

std::string to_string(Selection s) {
    switch (s) {
        case Selection::positive_selection: return "positive_selection";
        case Selection::negative_selection: return "negative_selection";
        case Selection::attractor: return "attractor";
        case Selection::unconverged: return "unconverged";
    }
    return "unknown";
}

AdaptiveResult adaptive_trajectory(double start_t, double t_min, double t_max, double step,
                                   const RewardFunction& reward, const SolverSettings& settings) {
    if (!(step > 0.0)) throw DomainError("adaptive step must be > 0");
    if (!(t_min > 0.0) || !(t_min <= start_t && start_t <= t_max)) {
        throw DomainError("need 0 < t_min <= start_t <= t_max");
    }
    const double slack = 1e-9 * step;
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    ResidentCache residents(reward, settings);

    AdaptiveResult out;
    // resident = start_t + k * step, kept as an integer offset to avoid drift
    long k = 0;
    int last_move = 0;
    const auto at = [&](long i) { return start_t + static_cast<double>(i) * step; };

    for (;;) {
        const double t = at(k);
        const bool can_up = at(k + 1) <= t_max + slack;
        const bool can_down = at(k - 1) >= t_min - slack;
        const auto& res = residents.get(t);
        AdaptiveStep row{t, nan, nan, "stop"};
        bool converged = res.converged;
        if (can_up) {
            const auto inv = invasion_against(at(k + 1), res, reward, settings);
            row.fitness_up = inv.fitness;
            converged = converged && inv.converged;
        }
        if (can_down && converged) {
            const auto inv = invasion_against(at(k - 1), res, reward, settings);
            row.fitness_down = inv.fitness;
            converged = converged && inv.converged;
        }
        out.final_t = t;
        if (!converged) {
            out.trace.push_back(row);
            out.classification = Selection::unconverged;
            return out;
        }

        int move = 0;
        if (row.fitness_up > 0.0) {
            move = 1;
        } else if (row.fitness_down > 0.0) {
            move = -1;
        }
        // An immediate reversal means the two neighbours point at each other.
        if (move != 0 && move == -last_move) move = 0;
        row.decision = move > 0 ? "up" : move < 0 ? "down" : "stop";
        out.trace.push_back(row);

        if (move == 0) {
            out.classification = Selection::attractor;
            if (!can_down && row.fitness_up < 0.0) out.classification = Selection::negative_selection;
            if (!can_up && row.fitness_down < 0.0) out.classification = Selection::positive_selection;
            return out;
        }
        k += move;
        last_move = move;
        const double next = at(k);
        if (move > 0 && next + step > t_max + slack) {
            out.final_t = next;
            out.classification = Selection::positive_selection;
            out.trace.push_back({next, nan, nan, "stop"});
            return out;
        }
        if (move < 0 && next - step < t_min - slack) {
            out.final_t = next;
            out.classification = Selection::negative_selection;
            out.trace.push_back({next, nan, nan, "stop"});
            return out;
        }
    }
}

std::vector<SymmetricRoot> symmetric_equilibria(const RewardFunction& reward, double temperature,
                                                double scan_step) {
    if (!(temperature > 0.0)) throw DomainError("temperature must be > 0");
    if (!(scan_step > 0.0 && scan_step < 0.5)) throw DomainError("scan step must lie in (0, 0.5)");
    const std::size_t n = reward.group_size();

    const auto phi = [&](double y) {
        const std::vector<Bernoulli> others(n - 1, from_logit(y));
        return gain_of(others, reward) - temperature * y;
    };

    double g_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) g_max = std::max(g_max, std::abs(reward.net_jump(k)));
    // outside [-bound, bound] the entropy term dominates every possible gain
    const double bound = g_max / temperature + 1.0;

    std::vector<double> grid{-bound, 0.0, bound};
    const auto cells = static_cast<std::size_t>(std::llround(1.0 / scan_step));
    for (std::size_t i = 1; i < cells; ++i) {
        const double y = logit(static_cast<double>(i) / static_cast<double>(cells));
        if (std::abs(y) < bound) grid.push_back(y);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> roots;
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = phi(grid[i]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (values[i] == 0.0) {
            roots.push_back(grid[i]);
            continue;
        }
        if (i + 1 == grid.size() || values[i + 1] == 0.0) continue;
        if ((values[i] > 0.0) == (values[i + 1] > 0.0)) continue;
        double lo = grid[i], hi = grid[i + 1];
        const bool lo_positive = values[i] > 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double v = phi(mid);
            if (v == 0.0) {
                lo = hi = mid;
                break;
            }
            ((v > 0.0) == lo_positive ? lo : hi) = mid;
        }
        roots.push_back(std::abs(phi(lo)) <= std::abs(phi(hi)) ? lo : hi);
    }

    const double s0 = phi(0.0);
    std::vector<SymmetricRoot> out;
    for (double y : roots) out.push_back({logistic(y), y, phi(y), false});
    // From x = 1/2 the one-dimensional flow moves monotonically to the nearest
    // root in the direction of the initial derivative.
    if (s0 == 0.0) {
        for (auto& r : out) r.reached_from_half = r.logit == 0.0;
    } else if (s0 > 0.0) {
        for (auto& r : out) {
            if (r.logit > 0.0) {
                r.reached_from_half = true;
                break;
            }
        }
    } else {
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (it->logit < 0.0) {
                it->reached_from_half = true;
                break;
            }
        }
    }
    return out;
}

std::vector<ManifoldPoint> null_manifold(double m_max, double temperature, std::size_t resolution,
                                         unsigned threads) {
    if (!(m_max > 0.0)) throw DomainError("m_max must be > 0");
    if (!(temperature > 0.0)) throw DomainError("temperature must be > 0");
    if (resolution == 0) throw DomainError("grid resolution must be >= 1");

    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i <= resolution; ++i) {
        for (std::size_t j = 0; i + j <= resolution; ++j) cells.emplace_back(i, j);
    }
    std::vector<ManifoldPoint> out(cells.size());
    parallel_for(cells.size(), threads, [&](std::size_t c) {
        const double res = static_cast<double>(resolution);
        ManifoldPoint& p = out[c];
        p.j0 = m_max * static_cast<double>(cells[c].first) / res;
        p.j1 = m_max * static_cast<double>(cells[c].second) / res;
        // rounding can push j0 + j1 a hair past m_max on the diagonal
        p.j1 = std::min(p.j1, m_max - p.j0);
        const auto reward = reward_from_jumps({p.j0, p.j1, m_max});
        const std::vector<double> half(reward.group_size() - 1, 0.5);
        const double g = expected_gain(half, reward);
        p.initial_derivative_sign = (g > 0.0) - (g < 0.0);
        p.roots = symmetric_equilibria(reward, temperature);
    });
    return out;
}

} // namespace evoq
