#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sys/wait.h>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evoq/cli.hpp"

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "evoq_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = std::string(EVOQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::string out(const std::string& name) { return (work_dir() / name).string(); }

const std::string kFig1 = "-s 'reward_values=[0,0,0,2,4,6]'";

} // namespace

TEST_CASE("exit codes") {
    CHECK(run("simulate " + kFig1 + " -s iterations=5 -o " + out("ok.csv")) == 0);
    CHECK(run("simulate " + kFig1 + " -s temperature=0 -o " + out("bad.csv")) == 1);
    CHECK(run("simulate -s group_size=1 -o " + out("bad.csv")) == 1);
    CHECK(run("simulate -o " + out("noreward.csv")) == 1);
    CHECK(run("no-such-command") == 64);
    CHECK(run("simulate --bogus-flag") == 64);
    CHECK(run("") == 64);
}

TEST_CASE("simulate writes one row per iteration plus metadata") {
    const auto path = out("sim.csv");
    REQUIRE(run("simulate " + kFig1 + " -s iterations=37 -s sample_interval=10 --seed 3 -o " + path) == 0);
    const auto rows = lines(path);
    REQUIRE(rows.size() == 38);
    CHECK(rows[0].rfind("step,mean_strategy,mean_temperature,empirical_contribution,agent_0", 0) == 0);
    const auto meta = nlohmann::json::parse(slurp(path + ".meta.json"));
    CHECK(meta.contains("config"));
}

TEST_CASE("replicas get their own files") {
    const auto path = out("reps.csv");
    REQUIRE(run("simulate " + kFig1 + " -s iterations=5 -s replicas=3 -o " + path) == 0);
    for (int r = 0; r < 3; ++r) CHECK(fs::exists(out("reps_r" + std::to_string(r) + ".csv")));
}

TEST_CASE("manifold covers the lower triangle") {
    const auto path = out("manifold.csv");
    REQUIRE(run("manifold -s sweep.m_max=3 -s sweep.resolution=4 -s temperature=0.1 -o " + path) == 0);
    const auto rows = lines(path);
    REQUIRE(rows.size() > 1);
    std::set<std::pair<std::string, std::string>> cells;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::istringstream ss(rows[i]);
        std::string j0, j1;
        std::getline(ss, j0, ',');
        std::getline(ss, j1, ',');
        cells.insert({j0, j1});
    }
    CHECK(cells.size() == 15);
}

TEST_CASE("adaptive reports an attractor for a zero-gain game") {
    const auto path = out("adaptive.csv");
    REQUIRE(run("adaptive -s 'reward_values=[0,1,2,3]' -s adaptive.start_temperature=0.3 -o " + path) == 0);
    const auto meta = slurp(path + ".meta.json");
    CHECK(meta.find("attractor") != std::string::npos);
}

TEST_CASE("reruns are byte-identical") {
    const std::vector<std::string> cmds{
        "simulate " + kFig1 + " -s iterations=50 -s replacement_rate=0.05 -s mutation_prob=0.1",
        "fixation " + kFig1 + " -s replacement_rate=0.1 -s fixation.trials=50",
        "ode-equilibrium " + kFig1,
        "invasion " + kFig1,
        "sweep-learning " + kFig1 + " -s iterations=20 -s replicas=2 -s 'sweep.alphas=[0.1,0.5]' -s 'sweep.gammas=[0,0.5]'",
        "sweep-temp-replacement -s iterations=20 -s replicas=2 -s 'sweep.temperatures=[0.5,1]'",
    };
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        const auto a = out("rerun_a" + std::to_string(i) + ".csv");
        const auto b = out("rerun_b" + std::to_string(i) + ".csv");
        REQUIRE(run(cmds[i] + " -j 1 -o " + a) == 0);
        REQUIRE(run(cmds[i] + " -j 4 -o " + b) == 0);
        CHECK_MESSAGE(slurp(a) == slurp(b), cmds[i]);
        CHECK(!slurp(a).empty());
    }
}

TEST_CASE("in-process entry point") {
    const auto path = out("inproc.csv");
    const std::vector<std::string> args{"evoq", "ode-equilibrium", "-s", "reward_values=[0,4,8,10]", "-o", path};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    CHECK(evoq::run_cli(static_cast<int>(argv.size()), argv.data()) == evoq::kExitOk);
    CHECK(lines(path).size() == 2);
    CHECK(evoq::subcommands().size() == 9);
}
