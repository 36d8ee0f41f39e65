#include "lmbp/config.hpp"
#include "lmbp/experiment.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace lmbp {
namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("lmbp_test_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

constexpr const char* kToyConfig = R"(# ten-step toy run
[scenario]
style = ts1
object_count = 2
appear_min = 1
appear_max = 3
disappear_after = 10
total_steps = 10

[clutter]
mean_count = 5

[filter]
track_particles = 200
phd_particles = 500
birth_particles = 500

run.mc_runs = 2
run.seed = 42
)";

RunConfig toy_config(const std::filesystem::path& out) {
    std::istringstream is(kToyConfig);
    RunConfig config = parse_run_config(is, "toy");
    config.out = out;
    return config;
}

TEST(Config, ParsesSectionsAndDottedKeys) {
    const RunConfig config = toy_config("x");
    EXPECT_EQ(config.scenario.object_count, 2);
    EXPECT_EQ(config.scenario.total_steps, 10);
    EXPECT_EQ(config.filter.clutter.mean_count, 5.0);
    EXPECT_EQ(config.scenario.clutter.mean_count, 5.0);
    EXPECT_EQ(config.filter.track_particles, 200u);
    EXPECT_EQ(config.mc_runs, 2);
    EXPECT_EQ(config.seed, 42u);
    EXPECT_DOUBLE_EQ(config.filter.thresholds.gamma_tr, 1e-2);
    EXPECT_DOUBLE_EQ(config.filter.motion.p_survival, 0.99);
}

TEST(Config, Ts2StyleSwitchesDefaults) {
    std::istringstream is("[scenario]\nstyle = ts2\n");
    const RunConfig config = parse_run_config(is);
    EXPECT_EQ(config.scenario.object_count, 20);
    EXPECT_EQ(config.scenario.total_steps, 250);
    EXPECT_DOUBLE_EQ(config.filter.sensor.pd_max, 0.5);
    EXPECT_DOUBLE_EQ(config.filter.clutter.mean_count, 150.0);
}

TEST(Config, InfiniteScaleAccepted) {
    std::istringstream is("sensor.pd_scale = inf\nsensor.pd_max = 0.95\n");
    const RunConfig config = parse_run_config(is);
    EXPECT_TRUE(std::isinf(config.filter.sensor.pd_scale));
}

void expect_error_mentions(const std::string& text, const std::string& needle) {
    std::istringstream is(text);
    try {
        (void)parse_run_config(is, "cfg");
        FAIL() << "expected a config error for: " << text;
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

TEST(Config, ErrorsNameTheField) {
    expect_error_mentions("[filter]\ngamma_tr = abc\n", "filter.gamma_tr");
    expect_error_mentions("[filter]\nbogus = 1\n", "filter.bogus");
    expect_error_mentions("[run]\nmc_runs = 0\n", "run.mc_runs");
    expect_error_mentions("[filter]\nmarginals = gibbs\n", "filter.marginals");
    expect_error_mentions("orphan = 1\n", "orphan");
    expect_error_mentions("[scenario\n", "cfg:1");
    expect_error_mentions("[filter]\ngamma_d = 0.5\ngamma_d = 0.6\n", "duplicate");
}

TEST(Experiment, ToyRunWritesOneRowPerStep) {
    const auto dir = scratch_dir("toy");
    const ExperimentSummary summary = run_experiment(toy_config(dir));
    EXPECT_EQ(summary.mospa.size(), 10u);
    std::ifstream in(dir / "mospa.csv");
    std::string line;
    int rows = 0;
    std::getline(in, line);
    EXPECT_EQ(line, "k,mospa");
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 10);
    EXPECT_TRUE(std::filesystem::exists(dir / "run_0001" / "estimates.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.txt"));
    EXPECT_NE(slurp(dir / "summary.txt").find("filter.gamma_tr = 0.01"), std::string::npos);
    EXPECT_EQ(summary.continuity_violations, 0u);
    std::filesystem::remove_all(dir);
}

TEST(Experiment, SameSeedGivesByteIdenticalCsv) {
    const auto a = scratch_dir("det_a");
    const auto b = scratch_dir("det_b");
    RunConfig config_a = toy_config(a);
    RunConfig config_b = toy_config(b);
    config_b.threads = 2;
    (void)run_experiment(config_a);
    (void)run_experiment(config_b);
    for (const auto& name : {"mospa.csv", "tracks.csv", "run_0000/estimates.csv", "run_0001/truth.csv",
                             "run_0001/frames.csv"}) {
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
        EXPECT_FALSE(slurp(a / name).empty()) << name;
    }
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(Experiment, FailureRemovesPartialOutputs) {
    const auto dir = scratch_dir("fail");
    RunConfig config = toy_config(dir);
    // Clutter switched off and an empty PHD: a measurement far outside the
    // model support makes the update throw.
    config.filter.clutter.mean_count = 0.0;
    config.filter.initial_phd_mass = 0.0;
    config.filter.birth.mean_births = 0.0;
    config.scenario.clutter.mean_count = 3.0;
    EXPECT_THROW((void)run_experiment(config), std::exception);
    EXPECT_FALSE(std::filesystem::exists(dir));
}

TEST(Experiment, DerivedSeedsDiffer) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

}  // namespace
}  // namespace lmbp
