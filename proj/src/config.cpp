#include "evoq/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "evoq/errors.hpp"

namespace evoq {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& field, const std::string& constraint) {
    if (!ok) throw ConfigError(field, constraint);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

// Reads keys from one JSON object, remembering which ones were consumed so
// that leftovers can be reported as unknown.
class Reader {
public:
    Reader(const json& obj, std::string prefix, std::vector<std::string>& defaulted)
        : obj_(obj), prefix_(std::move(prefix)), defaulted_(defaulted) {
        require(obj_.is_object(), prefix_.empty() ? "config" : prefix_.substr(0, prefix_.size() - 1),
                "must be a JSON object");
    }

    template <typename T>
    void get(const std::string& key, T& out) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            defaulted_.push_back(prefix_ + key);
            return;
        }
        try {
            out = it->template get<T>();
        } catch (const json::exception&) {
            throw ConfigError(prefix_ + key, "has the wrong type");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.contains(key);
    }

    const json* child(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            defaulted_.push_back(prefix_ + key);
            return nullptr;
        }
        return &*it;
    }

    void reject_unknown() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(prefix_ + it.key(), "is not a recognised key");
        }
    }

private:
    const json& obj_;
    std::string prefix_;
    std::vector<std::string>& defaulted_;
    std::set<std::string> seen_;
};

void set_path(json& root, const std::string& dotted, const json& value) {
    json* node = &root;
    std::size_t start = 0;
    for (;;) {
        const auto dot = dotted.find('.', start);
        const auto key = dotted.substr(start, dot - start);
        require(!key.empty(), dotted, "is not a valid override path");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

} // namespace

void EvolutionParams::validate() const {
    require(is_probability(replacement_rate), "replacement_rate", "must lie in [0, 1]");
    require(selection_strength >= 0.0, "beta", "must be >= 0");
    require(is_probability(mutation_prob), "mutation_prob", "must lie in [0, 1]");
    require(mutation_sigma >= 0.0 && std::isfinite(mutation_sigma), "mutation_sigma", "must be >= 0");
    require(temperature_min > 0.0, "temperature_min", "must be > 0");
    require(temperature_max >= temperature_min && std::isfinite(temperature_max), "temperature_max",
            "must be finite and >= temperature_min");
}

void SolverSettings::validate() const {
    require(tolerance > 0.0, "solver.tolerance", "must be > 0");
    require(max_time > 0.0, "solver.max_time", "must be > 0");
    require(rtol > 0.0, "solver.rtol", "must be > 0");
    require(atol > 0.0, "solver.atol", "must be > 0");
    require(max_steps > 0, "solver.max_steps", "must be >= 1");
}

void SimulationConfig::validate() const {
    require(group_size >= 2, "group_size", "must be ≥ 2");
    if (has_reward) {
        require(reward.group_size() == group_size, "reward_values", "must have group_size + 1 entries");
    }
    require(learner.alpha >= 0.0 && learner.alpha <= 1.0, "alpha", "must lie in [0, 1]");
    require(learner.gamma >= 0.0 && learner.gamma < 1.0, "gamma", "must lie in [0, 1)");
    require(learner.temperature > 0.0 && std::isfinite(learner.temperature), "temperature", "must be > 0");
    evolution.validate();
    require(iterations >= 1, "iterations", "must be ≥ 1");
    require(replicas >= 1, "replicas", "must be ≥ 1");
    require(!output.empty(), "output", "must be a non-empty path");

    require(fixation.mutant_temperature > 0.0, "fixation.mutant_temperature", "must be > 0");
    require(fixation.trials >= 1, "fixation.trials", "must be ≥ 1");
    require(fixation.max_steps >= 1, "fixation.max_steps", "must be ≥ 1");

    solver.validate();

    require(adaptive.temperature_min > 0.0, "adaptive.temperature_min", "must be > 0");
    require(adaptive.temperature_min <= adaptive.start_temperature &&
                adaptive.start_temperature <= adaptive.temperature_max,
            "adaptive.start_temperature", "must lie in [temperature_min, temperature_max]");
    require(adaptive.step > 0.0, "adaptive.step", "must be > 0");
    require(adaptive.mutant_temperature > 0.0, "adaptive.mutant_temperature", "must be > 0");

    for (double a : sweep.alphas) require(a >= 0.0 && a <= 1.0, "sweep.alphas", "values must lie in [0, 1]");
    for (double g : sweep.gammas) require(g >= 0.0 && g < 1.0, "sweep.gammas", "values must lie in [0, 1)");
    for (double t : sweep.temperatures) require(t > 0.0, "sweep.temperatures", "values must be > 0");
    for (double r : sweep.replacement_rates) {
        require(is_probability(r), "sweep.replacement_rates", "values must lie in [0, 1]");
    }
    require(sweep.m_max > 0.0, "sweep.m_max", "must be > 0");
    require(sweep.resolution >= 1, "sweep.resolution", "must be ≥ 1");
}

void SimulationConfig::require_reward() const {
    require(has_reward, "reward_values", "is required (or linear_k with group_size)");
}

SimulationConfig config_from_json(const json& j) {
    SimulationConfig c;
    Reader r(j, "", c.defaulted);

    const bool has_values = r.has("reward_values");
    const bool has_k = r.has("linear_k");
    require(!(has_values && has_k), "linear_k", "cannot be combined with reward_values");
    std::size_t group_size = 0;
    const bool has_group = r.has("group_size");
    if (has_group) {
        r.get("group_size", group_size);
        require(group_size >= 2, "group_size", "must be ≥ 2");
    }
    if (has_values) {
        std::vector<double> values;
        r.get("reward_values", values);
        try {
            c.reward = RewardFunction(values);
        } catch (const DomainError& e) {
            throw ConfigError("reward_values", std::string("is invalid: ") + e.what());
        }
        if (!has_group) group_size = c.reward.group_size();
        c.has_reward = true;
    } else if (has_k) {
        double k = 0.0;
        r.get("linear_k", k);
        require(std::isfinite(k), "linear_k", "must be finite");
        require(has_group, "group_size", "is required with linear_k");
        c.reward = linear_reward(k, group_size);
        c.linear_k = k;
        c.has_reward = true;
    } else {
        c.defaulted.push_back("reward_values");
    }
    if (!has_group && !has_values) {
        group_size = 3;
        c.defaulted.push_back("group_size");
    }
    c.group_size = group_size;

    r.get("alpha", c.learner.alpha);
    r.get("gamma", c.learner.gamma);
    r.get("temperature", c.learner.temperature);
    r.get("replacement_rate", c.evolution.replacement_rate);
    r.get("beta", c.evolution.selection_strength);
    r.get("mutation_prob", c.evolution.mutation_prob);
    r.get("mutation_sigma", c.evolution.mutation_sigma);
    r.get("temperature_min", c.evolution.temperature_min);
    r.get("temperature_max", c.evolution.temperature_max);
    r.get("iterations", c.iterations);
    r.get("replicas", c.replicas);
    r.get("master_seed", c.master_seed);
    r.get("sample_interval", c.sample_interval);
    r.get("threads", c.threads);
    r.get("output", c.output);

    if (const json* f = r.child("fixation")) {
        Reader fr(*f, "fixation.", c.defaulted);
        fr.get("mutant_temperature", c.fixation.mutant_temperature);
        fr.get("trials", c.fixation.trials);
        fr.get("max_steps", c.fixation.max_steps);
        fr.reject_unknown();
    }
    if (const json* s = r.child("solver")) {
        Reader sr(*s, "solver.", c.defaulted);
        sr.get("tolerance", c.solver.tolerance);
        sr.get("max_time", c.solver.max_time);
        sr.get("rtol", c.solver.rtol);
        sr.get("atol", c.solver.atol);
        sr.get("max_steps", c.solver.max_steps);
        sr.reject_unknown();
    }
    if (const json* a = r.child("adaptive")) {
        Reader ar(*a, "adaptive.", c.defaulted);
        ar.get("start_temperature", c.adaptive.start_temperature);
        ar.get("temperature_min", c.adaptive.temperature_min);
        ar.get("temperature_max", c.adaptive.temperature_max);
        ar.get("step", c.adaptive.step);
        ar.get("mutant_temperature", c.adaptive.mutant_temperature);
        ar.reject_unknown();
    }
    if (const json* s = r.child("sweep")) {
        Reader sr(*s, "sweep.", c.defaulted);
        sr.get("alphas", c.sweep.alphas);
        sr.get("gammas", c.sweep.gammas);
        sr.get("temperatures", c.sweep.temperatures);
        sr.get("replacement_rates", c.sweep.replacement_rates);
        sr.get("m_max", c.sweep.m_max);
        sr.get("resolution", c.sweep.resolution);
        sr.reject_unknown();
    }
    r.reject_unknown();
    c.validate();
    return c;
}

SimulationConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    json j = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        require(static_cast<bool>(in), "config", "file '" + path + "' cannot be opened");
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("config", std::string("is not valid JSON: ") + e.what());
        }
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        require(eq != std::string::npos && eq > 0, ov, "override must look like key=value");
        const auto key = ov.substr(0, eq);
        const auto text = ov.substr(eq + 1);
        json value;
        try {
            value = json::parse(text);
        } catch (const json::parse_error&) {
            value = text;  // bare strings such as output paths
        }
        set_path(j, key, value);
    }
    return config_from_json(j);
}

json to_json(const SimulationConfig& c) {
    json j;
    j["group_size"] = c.group_size;
    if (c.linear_k) {
        j["linear_k"] = *c.linear_k;
    } else if (c.has_reward) {
        j["reward_values"] = std::vector<double>(c.reward.values().begin(), c.reward.values().end());
    }
    j["alpha"] = c.learner.alpha;
    j["gamma"] = c.learner.gamma;
    j["temperature"] = c.learner.temperature;
    j["replacement_rate"] = c.evolution.replacement_rate;
    j["beta"] = c.evolution.selection_strength;
    j["mutation_prob"] = c.evolution.mutation_prob;
    j["mutation_sigma"] = c.evolution.mutation_sigma;
    j["temperature_min"] = c.evolution.temperature_min;
    j["temperature_max"] = c.evolution.temperature_max;
    j["iterations"] = c.iterations;
    j["replicas"] = c.replicas;
    j["master_seed"] = c.master_seed;
    j["sample_interval"] = c.sample_interval;
    j["threads"] = c.threads;
    j["output"] = c.output;
    j["fixation"] = {{"mutant_temperature", c.fixation.mutant_temperature},
                     {"trials", c.fixation.trials},
                     {"max_steps", c.fixation.max_steps}};
    j["solver"] = {{"tolerance", c.solver.tolerance},
                   {"max_time", c.solver.max_time},
                   {"rtol", c.solver.rtol},
                   {"atol", c.solver.atol},
                   {"max_steps", c.solver.max_steps}};
    j["adaptive"] = {{"start_temperature", c.adaptive.start_temperature},
                     {"temperature_min", c.adaptive.temperature_min},
                     {"temperature_max", c.adaptive.temperature_max},
                     {"step", c.adaptive.step},
                     {"mutant_temperature", c.adaptive.mutant_temperature}};
    j["sweep"] = {{"alphas", c.sweep.alphas},
                  {"gammas", c.sweep.gammas},
                  {"temperatures", c.sweep.temperatures},
                  {"replacement_rates", c.sweep.replacement_rates},
                  {"m_max", c.sweep.m_max},
                  {"resolution", c.sweep.resolution}};
    return j;
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("EVOQ_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace evoq
