// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evoq/cli.hpp"
#include "evoq/config.hpp"
#include "evoq/dynamics.hpp"
#include "evoq/evolution.hpp"
#include "evoq/experiments.hpp"
#include "evoq/game.hpp"
#include "evoq/parallel.hpp"
#include "evoq/random.hpp"
#include "oracles.hpp"

using namespace evoq;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes, pinned.
constexpr double kOracleTol = 1e-12;
constexpr int kOracleInstances = 1000;
constexpr double kOracleSeconds = 10.0;

constexpr std::uint64_t kFixationTrials = 10000;
constexpr double kFixationSigmas = 3.0;

constexpr std::uint64_t kFig2Replicas = 100;
constexpr std::uint64_t kFig2Iterations = 500;
constexpr double kFig2Low = 0.75;
constexpr double kFig2High = 0.95;
constexpr double kFig2CornerAlpha = 0.5;   // alpha >= this
constexpr double kFig2CornerGamma = 0.4;   // gamma <= this
constexpr double kFig2Plateau = 0.05;

constexpr int kFig1Seeds = 100;
constexpr std::uint64_t kFig1Iterations = 2000;

constexpr double kZeroGainTol = 1e-8;
constexpr double kZeroGainFitnessTol = 1e-9;
constexpr double kResidualTol = 1e-8;
constexpr double kRootTol = 1e-10;
constexpr double kFig4Seconds = 1800.0;
constexpr double kFig4CornerTol = 1e-9;
constexpr double kSymmetryTol = 1e-9;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << detail << std::endl;
    if (!pass) ++failures;
}

void note(const std::string& text) { std::cout << "       note: " << text << std::endl; }

std::string fmt(double v, int prec = 4) {
    std::ostringstream ss;
    ss.precision(prec);
    ss << v;
    return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimulationConfig with_reward(RewardFunction reward) {
    SimulationConfig c;
    c.reward = std::move(reward);
    c.has_reward = true;
    c.group_size = c.reward.group_size();
    c.threads = resolve_threads(0);
    return c;
}

const RewardFunction kFig1({0, 0, 0, 2, 4, 6});

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0xacce1);
    std::uniform_real_distribution<double> u(0.0, 1.0), val(-10.0, 10.0);
    double worst = 0.0;
    for (int i = 0; i < kOracleInstances; ++i) {
        const std::size_t n = 2 + rng() % 9;
        std::vector<double> f(n + 1), p(n - 1);
        for (auto& v : f) v = val(rng);
        for (auto& v : p) v = u(rng);
        const double got = expected_gain(p, RewardFunction(f));
        worst = std::max(worst, std::abs(got - oracle::expected_gain_enumerated(p, f)));
    }
    const double secs = seconds_since(t0);
    report(1, "expected gain vs subset enumeration", worst <= kOracleTol && secs < kOracleSeconds,
           std::to_string(kOracleInstances) + " instances, N in 2..10, max |diff| = " + fmt(worst) + " (tol " +
               fmt(kOracleTol) + "), " + fmt(secs, 3) + " s");
}

void criterion2() {
    auto c = with_reward(kFig1);
    c.learner.temperature = 0.5;
    c.evolution.replacement_rate = 0.05;
    c.master_seed = 2;
    const auto est = estimate_fixation(0.5, 0.5, c, kFixationTrials, c.threads);
    const double z = std::abs(est.probability - 0.2) / est.standard_error;
    report(2, "neutral fixation probability", est.censored == 0 && z <= kFixationSigmas,
           "p = " + fmt(est.probability) + " +- " + fmt(est.standard_error) + " over " +
               std::to_string(est.fixations + est.extinctions) + " trials, |p - 0.2| = " + fmt(z, 3) + " SE");
}

struct Fig2Grid {
    std::vector<double> means;  // alpha-major
    std::size_t best = 0;
    std::size_t plateau = 0;
    std::size_t above = 0;  // cells at or above kFig2Low
};

Fig2Grid fig2_grid(double k) {
    auto c = with_reward(linear_reward(k, 5));
    c.learner.temperature = 0.5;
    c.iterations = kFig2Iterations;
    c.replicas = kFig2Replicas;
    c.master_seed = 3;
    const auto res = sweep_learning_params(default_alpha_grid(), default_gamma_grid(), c, c.threads);
    Fig2Grid g;
    for (const auto& cell : res.cells) g.means.push_back(cell.mean);
    g.best = static_cast<std::size_t>(std::max_element(g.means.begin(), g.means.end()) - g.means.begin());
    for (double m : g.means) {
        g.plateau += m >= g.means[g.best] - kFig2Plateau;
        g.above += m >= kFig2Low;
    }
    return g;
}

void criterion3() {
    const auto alphas = default_alpha_grid();
    const auto gammas = default_gamma_grid();
    const auto low = fig2_grid(0.9);
    const auto high = fig2_grid(1.1);
    const double a = alphas[low.best / gammas.size()];
    const double g = gammas[low.best % gammas.size()];
    const double best = low.means[low.best];
    const bool corner = a >= kFig2CornerAlpha && g <= kFig2CornerGamma;
    const bool level = best >= kFig2Low && best <= kFig2High;
    const bool wider = high.plateau > low.plateau;
    report(3, "learning-parameter sweep", corner && level && wider,
           "k=0.9 best " + fmt(best) + " at alpha=" + fmt(a, 3) + ", gamma=" + fmt(g, 3) + " (need [" +
               fmt(kFig2Low) + ", " + fmt(kFig2High) + "] with alpha>=" + fmt(kFig2CornerAlpha) +
               ", gamma<=" + fmt(kFig2CornerGamma) + "); plateau cells k=1.1: " + std::to_string(high.plateau) +
               " vs k=0.9: " + std::to_string(low.plateau));
    note("cells with mean >= " + fmt(kFig2Low) + ": k=1.1 " + std::to_string(high.above) + " vs k=0.9 " +
         std::to_string(low.above) + "; k=1.1 max " + fmt(high.means[high.best]));
}

void criterion4() {
    struct Stats {
        double mean = 0.0;
        double sd = 0.0;
    };
    const auto run = [](double temperature) {
        auto c = with_reward(kFig1);
        c.learner = {0.1, 0.0, temperature};
        c.iterations = kFig1Iterations;
        std::vector<Stats> per_seed(kFig1Seeds);
        parallel_for(kFig1Seeds, c.threads, [&](std::size_t s) {
            const auto traj = run_simulation(c, derive_seed(4, {s}));
            const auto& xs = traj.final_strategies;
            double m = 0.0;
            for (double x : xs) m += x;
            m /= static_cast<double>(xs.size());
            double ss = 0.0;
            for (double x : xs) ss += (x - m) * (x - m);
            per_seed[s] = {m, std::sqrt(ss / static_cast<double>(xs.size()))};
        });
        Stats avg;
        for (const auto& s : per_seed) {
            avg.mean += s.mean / kFig1Seeds;
            avg.sd += s.sd / kFig1Seeds;
        }
        return avg;
    };
    const auto cold = run(0.5);
    const auto hot = run(1.0);
    report(4, "temperature effect on trajectories", cold.mean > hot.mean && hot.sd > cold.sd,
           std::to_string(kFig1Seeds) + " seeds x " + std::to_string(kFig1Iterations) +
               " iterations: mean T=0.5 " + fmt(cold.mean) + " vs T=1 " + fmt(hot.mean) +
               "; cross-agent sd T=1 " + fmt(hot.sd) + " vs T=0.5 " + fmt(cold.sd));
}

void criterion5() {
    double worst_x = 0.0;
    bool all_converged = true;
    for (std::size_t n = 2; n <= 5; ++n) {
        std::vector<double> f(n + 1);
        for (std::size_t i = 0; i <= n; ++i) f[i] = static_cast<double>(i);
        const RewardFunction reward(f);
        for (double t : {0.05, 0.1, 0.5, 1.0}) {
            const auto eq = solve_equilibrium({0.5, 0.5, t, t}, reward);
            all_converged = all_converged && eq.converged;
            worst_x = std::max({worst_x, std::abs(eq.strategies.x_mutant - 0.5),
                                std::abs(eq.strategies.x_resident - 0.5)});
        }
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> temp(0.05, 2.0);
    double worst_fit = 0.0;
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = 2 + rng() % 4;
        std::vector<double> f(n + 1);
        for (std::size_t k = 0; k <= n; ++k) f[k] = static_cast<double>(k);
        const auto inv = invasion_fitness(temp(rng), temp(rng), RewardFunction(f));
        all_converged = all_converged && inv.converged;
        worst_fit = std::max(worst_fit, std::abs(inv.fitness));
    }
    report(5, "zero-gain game", all_converged && worst_x < kZeroGainTol && worst_fit < kZeroGainFitnessTol,
           "max |x* - 0.5| = " + fmt(worst_x) + " (tol " + fmt(kZeroGainTol) + "), max |fitness| over 20 pairs = " +
               fmt(worst_fit) + " (tol " + fmt(kZeroGainFitnessTol) + ")");
}

void criterion6() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> val(0.0, 10.0), temp(0.05, 2.0), x(0.05, 0.95);
    int converged = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> f{0.0, val(rng), val(rng), val(rng)};
        const StrategyPair start{x(rng), x(rng), temp(rng), temp(rng)};
        const auto eq = solve_equilibrium(start, RewardFunction(f));
        if (!eq.converged) continue;
        ++converged;
        // gains from the enumeration oracle at the reported strategies
        const double xm = eq.strategies.x_mutant, xr = eq.strategies.x_resident;
        const double gm = oracle::expected_gain_enumerated(std::vector<double>{xr, xr}, f);
        const double gr = oracle::expected_gain_enumerated(std::vector<double>{xm, xr}, f);
        worst = std::max({worst, std::abs(gm - start.t_mutant * eq.logit_mutant),
                          std::abs(gr - start.t_resident * eq.logit_resident)});
    }
    report(6, "fixed-point residual", converged > 0 && worst < kResidualTol,
           std::to_string(converged) + "/100 converged, max |gain - T logit| = " + fmt(worst) + " (tol " +
               fmt(kResidualTol) + ")");
}

void criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    AdaptiveSettings adaptive;  // start 0.05, bounds [0.05, 1], step 0.01
    const unsigned threads = resolve_threads(0);
    const auto big = sweep_reward_space(10.0, 20, adaptive, {}, threads);
    std::size_t inner = 0, inner_positive = 0;
    std::string first_miss;
    double corner_t = -1.0;
    for (const auto& cell : big) {
        if (cell.j0 == 0.0 && cell.j1 == 0.0) corner_t = cell.outcome.final_t;
        if (cell.j0 > 1.0 && cell.j1 > 1.0) {
            ++inner;
            const bool pos = cell.outcome.classification == Selection::positive_selection &&
                             cell.outcome.final_t == adaptive.temperature_max;
            inner_positive += pos;
            if (!pos && first_miss.empty()) {
                first_miss = "(" + fmt(cell.j0) + ", " + fmt(cell.j1) + ") -> " +
                             to_string(cell.outcome.classification) + " at T=" + fmt(cell.outcome.final_t);
            }
        }
    }
    const auto small = sweep_reward_space(3.0, 20, adaptive, {}, threads);
    std::size_t non_positive = 0;
    for (const auto& cell : small) non_positive += cell.outcome.classification != Selection::positive_selection;
    const double secs = seconds_since(t0);

    const bool inner_ok = inner_positive == inner;
    const bool corner_ok = std::abs(corner_t - adaptive.start_temperature) < kFig4CornerTol;
    const bool small_ok = 2 * non_positive > small.size();
    std::string detail = "m=10: " + std::to_string(inner_positive) + "/" + std::to_string(inner) +
                         " cells with j0>1, j1>1 positive";
    if (!first_miss.empty()) detail += " (first miss " + first_miss + ")";
    detail += "; corner final_T=" + fmt(corner_t) + "; m=3: " + std::to_string(non_positive) + "/" +
              std::to_string(small.size()) + " non-positive; " + fmt(secs, 3) + " s";
    report(7, "reward-space selection", inner_ok && corner_ok && small_ok && secs < kFig4Seconds, detail);

    // Where the m=10 transition actually sits, for the record.
    double lowest_positive_sum = 1e9, highest_negative_sum = -1.0;
    for (const auto& cell : big) {
        const double s = cell.j0 + cell.j1;
        if (cell.outcome.classification == Selection::positive_selection) {
            lowest_positive_sum = std::min(lowest_positive_sum, s);
        } else {
            highest_negative_sum = std::max(highest_negative_sum, s);
        }
    }
    note("m=10 positive selection for j0+j1 >= " + fmt(lowest_positive_sum) + ", non-positive up to j0+j1 = " +
         fmt(highest_negative_sum));
}

void criterion8() {
    const double m = 3.0, t = 0.1;
    const std::size_t res = 20;
    const auto pts = null_manifold(m, t, res, resolve_threads(0));
    double worst = 0.0;
    std::size_t roots = 0;
    double best_x = -1.0;
    for (const auto& p : pts) {
        const std::vector<double> f{0.0, p.j0, p.j0 + p.j1, m};
        for (const auto& r : p.roots) {
            ++roots;
            const long double g = oracle::symmetric_gain3(r.x_star, f);
            worst = std::max(worst, std::abs(static_cast<double>(g) - t * r.logit));
            if (r.reached_from_half) best_x = std::max(best_x, r.x_star);
        }
    }
    // every grid cell whose equilibrium reached from 1/2 attains the maximum
    const double step = m / static_cast<double>(res);
    bool placement = true;
    std::string where;
    for (const auto& p : pts) {
        for (const auto& r : p.roots) {
            if (!r.reached_from_half || r.x_star < best_x) continue;
            const bool on_boundary = p.j0 + p.j1 >= m - step / 2;
            const bool small_j0 = p.j0 <= m / 4;
            placement = placement && on_boundary && small_j0;
            if (where.size() < 120) where += " (" + fmt(p.j0) + ", " + fmt(p.j1) + ")";
        }
    }
    report(8, "null manifold", worst < kRootTol && placement,
           std::to_string(roots) + " roots, max root residual = " + fmt(worst) + " (tol " + fmt(kRootTol) +
               "); max contribution from 1/2 x* = " + fmt(best_x, 10) + " at" + where +
               (placement ? "" : " (not on j0+j1 = m with small j0)"));

    // Largest contribution along the boundary itself, for comparison.
    double boundary_best = -1.0, boundary_j0 = 0.0;
    for (const auto& p : pts) {
        if (p.j0 + p.j1 < m - step / 2) continue;
        for (const auto& r : p.roots) {
            if (r.reached_from_half && r.x_star > boundary_best) {
                boundary_best = r.x_star;
                boundary_j0 = p.j0;
            }
        }
    }
    note("on j0+j1 = m the largest x* reached from 1/2 is " + fmt(boundary_best) + " at j0 = " + fmt(boundary_j0));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion9() {
    const auto dir = fs::temp_directory_path() / "evoq_acceptance";
    fs::create_directories(dir);
    auto base = with_reward(kFig1);
    base.master_seed = 9;
    base.iterations = 200;
    base.replicas = 3;
    base.evolution.replacement_rate = 0.05;
    base.evolution.mutation_prob = 0.05;
    base.fixation.trials = 200;
    base.sweep.alphas = {0.2, 0.8};
    base.sweep.gammas = {0.0, 0.5};
    base.sweep.temperatures = {0.25, 1.0};
    base.sweep.replacement_rates = {0.0, 0.05};
    base.sweep.m_max = 3.0;
    base.sweep.resolution = 4;

    std::size_t identical = 0;
    std::string mismatched;
    for (const auto& sub : subcommands()) {
        auto c = base;
        if (sub == "adaptive" || sub == "sweep-reward-space" || sub == "manifold") {
            c.reward = RewardFunction({0, 0.5, 1.5, 3});
            c.group_size = 3;
            c.adaptive.step = 0.05;
        }
        std::string bytes[2];
        bool ok = true;
        for (int run = 0; run < 2; ++run) {
            c.output = (dir / (sub + "_" + std::to_string(run) + ".csv")).string();
            c.threads = run == 0 ? 1 : resolve_threads(0) + 3;
            std::ostringstream sink;  // subcommands echo summaries to stdout
            auto* saved = std::cout.rdbuf(sink.rdbuf());
            ok = ok && dispatch(sub, c) == kExitOk;
            std::cout.rdbuf(saved);
            std::string all;
            const auto stem = fs::path(c.output).stem().string();
            if (sub == "simulate") {
                for (int r = 0; r < 3; ++r) all += slurp((dir / (stem + "_r" + std::to_string(r) + ".csv")).string());
            } else {
                all = slurp(c.output);
            }
            bytes[run] = all;
        }
        if (ok && !bytes[0].empty() && bytes[0] == bytes[1]) {
            ++identical;
        } else {
            mismatched += " " + sub;
        }
    }
    fs::remove_all(dir);
    report(9, "byte-identical reruns", identical == subcommands().size(),
           std::to_string(identical) + "/" + std::to_string(subcommands().size()) +
               " subcommands identical across two runs (1 vs many threads)" +
               (mismatched.empty() ? "" : "; differing:" + mismatched));
}

void criterion10() {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> val(0.0, 10.0), temp(0.05, 2.0), x(0.02, 0.98);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 2 + rng() % 5;
        std::vector<double> f(n + 1);
        for (auto& v : f) v = val(rng);
        const double t = temp(rng), x0 = x(rng);
        std::vector<PathPoint> path;
        integrate_pair({x0, x0, t, t}, RewardFunction(f), 100.0, {}, &path);
        for (const auto& p : path) worst = std::max(worst, std::abs(p.x_mutant - p.x_resident));
    }
    report(10, "mutant/resident symmetry", worst < kSymmetryTol,
           "50 games, max_t |x_m - x_r| = " + fmt(worst) + " (tol " + fmt(kSymmetryTol) + ")");
}

} // namespace

int main() {
    const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                      criterion6, criterion7, criterion8, criterion9, criterion10};
    for (const auto& run : criteria) {
        try {
            run();
        } catch (const std::exception& e) {
            std::cout << "[FAIL] exception: " << e.what() << std::endl;
            ++failures;
        }
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
