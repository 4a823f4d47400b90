// Sweep harness tests: config parsing, determinism across reruns and thread
// counts, degenerate orchestration, and output formats.
#include <algorithm>
#include <cmath>
#include <gtest/gtest.h>
#include <sstream>

#include "fadesched/sim_harness.hpp"

using namespace fadesched;

namespace {

SweepConfig small_config() {
    SweepConfig cfg;
    cfg.k_values = {20, 50};
    cfg.trials = 40;
    cfg.power = 1.0;
    cfg.seed = 99;
    cfg.strategies = {Strategy::max_snr_fixed_length, Strategy::max_snr_adaptive,
                      Strategy::threshold_correlation};
    return cfg;
}

std::string csv_of(const SweepResult& result) {
    std::ostringstream os;
    write_csv(result, os);
    return os.str();
}

} // namespace

// =============================================================================
// Config parsing
// =============================================================================

TEST(ConfigParse, RoundTrip) {
    std::istringstream is(
        "# sweep description\n"
        "k_values = 100, 1000\n"
        "power = 2.5\n"
        "trials = 7\n"
        "strategies = I, III, optimal-reference\n"
        "seed = 1234567\n"
        "alpha_distribution = uniform\n"
        "exponent_mode = exact_mc\n"
        "mc_samples = 5000\n");
    const SweepConfig cfg = parse_config(is);
    EXPECT_EQ(cfg.k_values, (std::vector<long>{100, 1000}));
    EXPECT_DOUBLE_EQ(cfg.power, 2.5);
    EXPECT_EQ(cfg.trials, 7);
    ASSERT_EQ(cfg.strategies.size(), 3u);
    EXPECT_EQ(cfg.strategies[0], Strategy::max_snr_fixed_length);
    EXPECT_EQ(cfg.strategies[1], Strategy::threshold_correlation);
    EXPECT_EQ(cfg.strategies[2], Strategy::best_throughput);
    EXPECT_EQ(cfg.seed, 1234567u);
    EXPECT_EQ(cfg.exponent_mode, ExponentMode::exact_mc);
    EXPECT_EQ(cfg.mc_samples, 5000);
}

TEST(ConfigParse, UnknownKeyIsError) {
    std::istringstream is("k_values = 10\nwindow = 5\n");
    EXPECT_THROW(parse_config(is), ConfigError);
}

TEST(ConfigParse, BadValuesAreErrors) {
    {
        std::istringstream is("k_values = 10, banana\n");
        EXPECT_THROW(parse_config(is), ConfigError);
    }
    {
        std::istringstream is("strategies = I, IV\nk_values = 10\n");
        EXPECT_THROW(parse_config(is), ConfigError);
    }
    {
        std::istringstream is("k_values\n");
        EXPECT_THROW(parse_config(is), ConfigError);
    }
}

TEST(ConfigValidate, RejectsBadShapes) {
    SweepConfig cfg = small_config();
    cfg.k_values = {};
    EXPECT_THROW(validate_config(cfg), ConfigError);
    cfg = small_config();
    cfg.k_values = {50, 20};
    EXPECT_THROW(validate_config(cfg), ConfigError);
    cfg = small_config();
    cfg.trials = 0;
    EXPECT_THROW(validate_config(cfg), ConfigError);
    cfg = small_config();
    cfg.exponent_mode = ExponentMode::exact_mc;
    cfg.mc_samples = 100;
    EXPECT_THROW(validate_config(cfg), ConfigError);
}

// =============================================================================
// Orchestration
// =============================================================================

TEST(RunSweep, DegenerateCaseEqualsDirectCall) {
    SweepConfig cfg;
    cfg.k_values = {1};
    cfg.trials = 1;
    cfg.seed = 4242;
    cfg.strategies = {Strategy::max_snr_adaptive};
    const SweepResult result = run_sweep(cfg, 1);
    ASSERT_EQ(result.rows.size(), 1u);

    // replay the single trial by hand
    SplitRng rng = SplitRng::substream(cfg.seed, 1, 0);
    const double u0 = sample_initial(rng);
    double alpha = rng.uniform();
    while (alpha <= 0.0) alpha = rng.uniform();
    Population pop{{{0, u0, alpha}}, cfg.power};
    const ScheduleOutcome direct = schedule_max_snr_adaptive(pop);

    EXPECT_EQ(result.rows[0].mean_throughput, direct.design.throughput);
    EXPECT_EQ(result.rows[0].mean_u0sq, u0 * u0);
    EXPECT_EQ(result.rows[0].mean_alpha, alpha);
    EXPECT_EQ(result.rows[0].std_error, 0.0);
}

TEST(RunSweep, BitIdenticalAcrossRunsAndThreadCounts) {
    const SweepConfig cfg = small_config();
    const std::string serial = csv_of(run_sweep(cfg, 1));
    const std::string serial_again = csv_of(run_sweep(cfg, 1));
    const std::string parallel = csv_of(run_sweep(cfg, 4));
    EXPECT_EQ(serial, serial_again);
    EXPECT_EQ(serial, parallel);
}

TEST(RunSweep, SeedChangesOutput) {
    SweepConfig cfg = small_config();
    const std::string a = csv_of(run_sweep(cfg, 1));
    cfg.seed += 1;
    const std::string b = csv_of(run_sweep(cfg, 1));
    EXPECT_NE(a, b);
}

TEST(RunSweep, AdaptiveDominatesFixedInAggregate) {
    SweepConfig cfg = small_config();
    cfg.k_values = {100};
    cfg.trials = 60;
    const SweepResult result = run_sweep(cfg, 2);
    double mean_fixed = -1.0, mean_adaptive = -1.0;
    for (const auto& row : result.rows) {
        if (row.strategy == Strategy::max_snr_fixed_length) mean_fixed = row.mean_throughput;
        if (row.strategy == Strategy::max_snr_adaptive) mean_adaptive = row.mean_throughput;
    }
    EXPECT_GE(mean_adaptive, mean_fixed);
}

TEST(RunSweep, GapToCeilingStaysPositiveForMaxSnrRules) {
    SweepConfig cfg = small_config();
    cfg.k_values = {100, 1000};
    cfg.trials = 80;
    const SweepResult result = run_sweep(cfg, 2);
    for (const auto& row : result.rows) {
        if (row.strategy == Strategy::max_snr_fixed_length ||
            row.strategy == Strategy::max_snr_adaptive) {
            EXPECT_GT(row.gap, 0.5) << "K=" << row.k;
        }
    }
}

TEST(RunSweep, FallbackRateOnlyForThresholdRule) {
    SweepConfig cfg = small_config();
    cfg.k_values = {20};
    cfg.trials = 50;
    const SweepResult result = run_sweep(cfg, 2);
    for (const auto& row : result.rows) {
        if (row.strategy != Strategy::threshold_correlation) {
            EXPECT_EQ(row.fallback_rate, 0.0);
        } else {
            EXPECT_GE(row.fallback_rate, 0.0);
            EXPECT_LE(row.fallback_rate, 1.0);
        }
    }
}

TEST(RunSweep, ExactMcModeRunsAndStaysBelowRate) {
    SweepConfig cfg;
    cfg.k_values = {30};
    cfg.trials = 3;
    cfg.seed = 7;
    cfg.strategies = {Strategy::max_snr_adaptive};
    cfg.exponent_mode = ExponentMode::exact_mc;
    cfg.mc_samples = 1000;
    const SweepResult result = run_sweep(cfg, 1);
    ASSERT_EQ(result.rows.size(), 1u);
    EXPECT_GE(result.rows[0].mean_throughput, 0.0);
    EXPECT_TRUE(std::isfinite(result.rows[0].mean_throughput));
}

TEST(EmpiricalFixedLength, DeterministicAndInRange) {
    const int n1 = empirical_fixed_length(50, 1.0, 30, 11);
    const int n2 = empirical_fixed_length(50, 1.0, 30, 11);
    EXPECT_EQ(n1, n2);
    EXPECT_GE(n1, 1);
    EXPECT_LE(n1, 50);
}

// =============================================================================
// Output formats
// =============================================================================

TEST(WriteCsv, HeaderAndShape) {
    const SweepConfig cfg = small_config();
    const SweepResult result = run_sweep(cfg, 2);
    const std::string csv = csv_of(result);
    EXPECT_EQ(csv.rfind("k,strategy,mean_throughput,stderr,mean_u0sq,mean_alpha,fallback_rate,"
                        "law_value,gap\n",
                        0),
              0u);
    // one line per (K, strategy) plus header
    const std::size_t lines = static_cast<std::size_t>(
        std::count(csv.begin(), csv.end(), '\n'));
    EXPECT_EQ(lines, 1u + cfg.k_values.size() * cfg.strategies.size());
}

TEST(WriteCsv, SeventeenDigitRoundTrip) {
    const SweepConfig cfg = small_config();
    const SweepResult result = run_sweep(cfg, 1);
    std::istringstream is(csv_of(result));
    std::string line;
    std::getline(is, line);  // header
    std::getline(is, line);
    // third field is the mean throughput; parse it back and compare exactly
    std::size_t pos = 0;
    for (int i = 0; i < 2; ++i) pos = line.find(',', pos) + 1;
    const double parsed = std::stod(line.substr(pos, line.find(',', pos) - pos));
    EXPECT_EQ(parsed, result.rows[0].mean_throughput);
}

TEST(WriteJson, EchoesConfigAndRows) {
    const SweepConfig cfg = small_config();
    const SweepResult result = run_sweep(cfg, 2);
    const auto j = to_json(result);
    EXPECT_EQ(j["seed"], cfg.seed);
    EXPECT_EQ(j["config"]["trials"], cfg.trials);
    EXPECT_EQ(j["config"]["exponent_mode"], "theorem1");
    EXPECT_EQ(j["results"].size(), cfg.k_values.size() * cfg.strategies.size());
    EXPECT_EQ(j["results"][0]["strategy"], "I");
}
