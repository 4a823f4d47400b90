// Operating-point solver tests: the Gallager parameter characterizations,
// the coupled stationarity system against a brute-force grid, the closed-form
// throughput, and the large-gain asymptotics.
#include <cmath>
#include <gtest/gtest.h>

#include "fadesched/link_optimizer.hpp"
#include "fadesched/validation.hpp"

using namespace fadesched;

// =============================================================================
// optimal_rho
// =============================================================================

TEST(OptimalRho, Branches) {
    EXPECT_DOUBLE_EQ(optimal_rho(0.0), 0.0);
    EXPECT_DOUBLE_EQ(optimal_rho(-3.0), 0.0);
    EXPECT_DOUBLE_EQ(optimal_rho(1.20), 1.0);  // above log 2 + 1/2 ~ 1.19315
    EXPECT_NEAR(optimal_rho(0.5), 0.30505946679502, 1e-8);
}

TEST(OptimalRho, ResidualOnRandomInputs) {
    SplitRng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const double beta = rng.uniform() * rho_saturation_beta;
        const double rho = optimal_rho(beta);
        EXPECT_LE(std::abs(std::log1p(rho) + rho / (1.0 + rho) - beta), 1e-10);
    }
}

TEST(OptimalRho, MonotoneAndContinuousAtBoundaries) {
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double rho = optimal_rho(-0.2 + 1.6 * i / 200.0);
        EXPECT_GE(rho, prev);
        prev = rho;
    }
    EXPECT_LE(optimal_rho(1e-12), 1e-9);
    EXPECT_LE(1.0 - optimal_rho(rho_saturation_beta - 1e-12), 1e-9);
}

// =============================================================================
// rho_from_length
// =============================================================================

TEST(RhoFromLength, Substitution) {
    EXPECT_NEAR(rho_from_length(1.0, std::exp(-0.25)), 1.0 / 3.0, 1e-12);  // x = 1/4
    EXPECT_DOUBLE_EQ(rho_from_length(1.0, std::exp(-0.5)), 1.0);           // x = 1/2
    EXPECT_DOUBLE_EQ(rho_from_length(10.0, 0.5), 1.0);
    EXPECT_LT(rho_from_length(1.0, 0.9999999), 1e-5);  // alpha -> 1 gives rho -> 0
}

// =============================================================================
// Fixed-length rate stationarity
// =============================================================================

TEST(OptimizeRateForLength, StationarityResidual) {
    const OptimalityInputs in{100.0, 0.9, 1.0};
    for (double n : {1.0, 3.0, 10.0}) {
        const RateSolution rs = optimize_rate_for_length(in, n);
        ASSERT_EQ(rs.status, SolveStatus::ok);
        const double ceiling = std::log(in.power * in.u0 * in.u0) + (n + 1.0) * std::log(in.alpha);
        const double penalty = std::log1p(rs.rho * n * rs.rate) / (rs.rho * n);
        EXPECT_NEAR(rs.rate, ceiling - std::log1p(rs.rho) - penalty, 1e-7);
        // throughput consistency with the raw objective
        EXPECT_NEAR(rs.throughput, throughput_objective(rs.rate, n, in), 1e-8);
    }
}

TEST(OptimizeRateForLength, WeakChannelHasNoPositiveRate) {
    const RateSolution rs = optimize_rate_for_length({0.5, 0.9, 1.0}, 4.0);
    EXPECT_EQ(rs.status, SolveStatus::no_positive_rate);
    EXPECT_EQ(rs.throughput, 0.0);
}

TEST(OptimizeRateForLength, MaximizesOverRateGrid) {
    const OptimalityInputs in{100.0, 0.9, 1.0};
    const double n = 6.0;
    const RateSolution rs = optimize_rate_for_length(in, n);
    ASSERT_EQ(rs.status, SolveStatus::ok);
    double grid_best = 0.0;
    const double rate_max = std::log(in.power * in.u0 * in.u0);
    for (int j = 1; j <= 20000; ++j) {
        grid_best = std::max(grid_best, throughput_objective(rate_max * j / 20000.0, n, in));
    }
    EXPECT_GE(rs.throughput, 0.9999 * grid_best);
}

// =============================================================================
// Joint operating point
// =============================================================================

TEST(SolveOperatingPoint, QuasiStaticBranch) {
    const OperatingPoint op = solve_operating_point({100.0, 1.0, 1.0});
    EXPECT_EQ(op.status, SolveStatus::ok);
    EXPECT_TRUE(op.quasi_static);
    EXPECT_DOUBLE_EQ(op.rho, 0.0);
    EXPECT_DOUBLE_EQ(op.rate, std::log(1e4));
    EXPECT_DOUBLE_EQ(op.throughput, op.rate);
    EXPECT_DOUBLE_EQ(op.length, SolveOptions{}.quasi_static_length);
}

TEST(SolveOperatingPoint, WeakChannelsLandOnBoundaryOrRefuse) {
    // hopeless channel: even one channel use has no positive rate
    EXPECT_EQ(solve_operating_point({1.0, 0.9, 1.0}).status, SolveStatus::no_positive_rate);
    // weak but usable: no interior fixed point, solved on the N = 1 boundary
    const OperatingPoint op = solve_operating_point({1.6, 0.9, 1.0});
    EXPECT_EQ(op.status, SolveStatus::ok);
    EXPECT_TRUE(op.length_clamped);
    EXPECT_DOUBLE_EQ(op.length, 1.0);
    EXPECT_GT(op.throughput, 0.0);
    const RateSolution rs = optimize_rate_for_length({1.6, 0.9, 1.0}, 1.0);
    EXPECT_EQ(op.throughput, rs.throughput);
}

TEST(SolveOperatingPoint, FixedPointResiduals) {
    const OptimalityInputs in{100.0, 0.9, 1.0};
    const OperatingPoint op = solve_operating_point(in);
    ASSERT_EQ(op.status, SolveStatus::ok);
    const double la = std::log(1.0 / in.alpha);
    // rate relation
    EXPECT_NEAR(op.rate,
                std::log(in.power * in.u0 * in.u0) - (2.0 * op.length + 1.0) * la -
                    std::log1p(op.rho),
                1e-8);
    // length relation (N appears on both sides)
    EXPECT_NEAR(op.length,
                std::sqrt(std::log1p(op.rho * op.length * op.rate) / (op.rho * la)), 1e-8);
    // Gallager parameter relation
    EXPECT_NEAR(op.rho, rho_from_length(op.length, in.alpha), 1e-8);
    // closed-form throughput consistency
    EXPECT_NEAR(op.throughput, throughput_closed_form(op.rate, op.length, op.rho, in).value,
                1e-9);
}

TEST(SolveOperatingPoint, RegressionAtStrongGain) {
    const OperatingPoint op = solve_operating_point({100.0, 0.9, 1.0});
    ASSERT_EQ(op.status, SolveStatus::ok);
    EXPECT_NEAR(op.length, 5.9898986191261185, 1e-5);
    EXPECT_DOUBLE_EQ(op.rho, 1.0);
    EXPECT_NEAR(op.rate, 7.1496350612599535, 1e-6);
    EXPECT_NEAR(op.throughput, 6.986496694042997, 1e-6);
}

TEST(SolveOperatingPoint, BeatsGridOracle) {
    const OptimalityInputs in{100.0, 0.9, 1.0};
    const OperatingPoint op = solve_operating_point(in);
    ASSERT_EQ(op.status, SolveStatus::ok);
    const GridOraclePoint grid = grid_oracle(in, 200, 2000);
    EXPECT_GE(op.throughput, 0.99 * grid.throughput);
    EXPECT_LE(op.throughput, 1.01 * grid.throughput);
    EXPECT_NEAR(op.length, grid.length, 1.0);
}

TEST(SolveOperatingPoint, SlowFadingOptimumSitsInUnsaturatedBranch) {
    // At alpha = 0.99 the grid-verified optimum has N log(1/alpha) < 1/2,
    // i.e. rho < 1, and the length lands near the cube-root scale rather
    // than the sqrt scale of the saturated branch.
    const OptimalityInputs in{1000.0, 0.99, 1.0};
    const OperatingPoint op = solve_operating_point(in);
    ASSERT_EQ(op.status, SolveStatus::ok);
    EXPECT_LT(op.rho, 1.0);
    const GridOraclePoint grid = grid_oracle(in, 200, 2000);
    EXPECT_GE(op.throughput, 0.99 * grid.throughput);
    EXPECT_NEAR(op.length, grid.length, 1.0);
    const double ll = std::log(std::log(in.power * in.u0 * in.u0));
    const double la = std::log(1.0 / in.alpha);
    const double cbrt_scale = std::cbrt(ll / (la * la));
    EXPECT_NEAR(op.length / cbrt_scale, 1.0, 0.3);
}

TEST(SolveOperatingPoint, ThroughputMonotoneInGainAndCorrelation) {
    double prev_alpha = -1.0;
    for (double alpha : {0.5, 0.7, 0.9, 0.99}) {
        const OperatingPoint op = solve_operating_point({100.0, alpha, 1.0});
        ASSERT_EQ(op.status, SolveStatus::ok);
        EXPECT_GT(op.throughput, prev_alpha);
        prev_alpha = op.throughput;
    }
    double prev_gain = -1.0;
    for (double u0sq : {1e2, 1e3, 1e4, 1e5, 1e6}) {
        const OperatingPoint op = solve_operating_point({std::sqrt(u0sq), 0.9, 1.0});
        ASSERT_EQ(op.status, SolveStatus::ok);
        EXPECT_GT(op.throughput, prev_gain);
        prev_gain = op.throughput;
    }
}

TEST(SolveOperatingPoint, GridEquivalenceOnRandomInstances) {
    SplitRng rng(2024);
    for (int i = 0; i < 10; ++i) {
        const double u0sq = std::pow(10.0, 2.0 + 4.0 * rng.uniform());
        const double alpha = 0.5 + 0.495 * rng.uniform();
        const OptimalityInputs in{std::sqrt(u0sq), alpha, 1.0};
        const OperatingPoint op = solve_operating_point(in);
        ASSERT_EQ(op.status, SolveStatus::ok) << "u0sq=" << u0sq << " alpha=" << alpha;
        const GridOraclePoint grid = grid_oracle(in, 200, 1000);
        EXPECT_GE(op.throughput, 0.99 * grid.throughput)
            << "u0sq=" << u0sq << " alpha=" << alpha;
    }
}

TEST(SolveOperatingPoint, LocalConcavityAtFixedPoint) {
    const OptimalityInputs in{100.0, 0.9, 1.0};
    const OperatingPoint op = solve_operating_point(in);
    ASSERT_EQ(op.status, SolveStatus::ok);
    const double hr = 1e-3 * op.rate;
    const double hn = 1e-3 * op.length;
    const auto f = [&](double r, double n) { return throughput_objective(r, n, in); };
    const double f0 = f(op.rate, op.length);
    const double frr =
        (f(op.rate + hr, op.length) - 2.0 * f0 + f(op.rate - hr, op.length)) / (hr * hr);
    const double fnn =
        (f(op.rate, op.length + hn) - 2.0 * f0 + f(op.rate, op.length - hn)) / (hn * hn);
    const double frn = (f(op.rate + hr, op.length + hn) - f(op.rate + hr, op.length - hn) -
                        f(op.rate - hr, op.length + hn) + f(op.rate - hr, op.length - hn)) /
                       (4.0 * hr * hn);
    // eigenvalues of the 2x2 Hessian must be nonpositive (numerical slack)
    const double tr = frr + fnn;
    const double det = frr * fnn - frn * frn;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    EXPECT_LE(tr / 2.0 + disc, 1e-6);
    EXPECT_LE(tr / 2.0 - disc, 1e-6);
}

TEST(SolveOperatingPoint, IntegerVariantBracketsRealLength) {
    const OperatingPoint op = solve_operating_point({100.0, 0.9, 1.0});
    ASSERT_EQ(op.status, SolveStatus::ok);
    const double n_int = op.integer_design.length;
    EXPECT_TRUE(n_int == std::floor(op.length) || n_int == std::ceil(op.length));
    EXPECT_GT(op.integer_design.throughput, 0.0);
    EXPECT_NEAR(op.integer_design.throughput, op.throughput, 0.2 * op.throughput);
}

// =============================================================================
// Closed-form throughput
// =============================================================================

TEST(ThroughputClosedForm, LargeProductLimit) {
    // rho N R -> infinity: value approaches the leading factor
    const OptimalityInputs in{100.0, 0.9, 1.0};
    const double lead = std::log(in.power * in.u0 * in.u0 / 2.0) + 21.0 * std::log(in.alpha);
    const ThroughputValue tv = throughput_closed_form(1e9, 10.0, 1.0, in);
    EXPECT_NEAR(tv.value, lead, 1e-6);
    EXPECT_FALSE(tv.clamped);
}

TEST(ThroughputClosedForm, ClampsNegativeLeadingFactor) {
    // (2N+1) log(1/alpha) exceeds log(P u0^2/(1+rho)) -> clamp to zero
    const OptimalityInputs in{3.0, 0.5, 1.0};
    const ThroughputValue tv = throughput_closed_form(1.0, 5.0, 1.0, in);
    EXPECT_EQ(tv.value, 0.0);
    EXPECT_TRUE(tv.clamped);
}

// =============================================================================
// Large-gain asymptotics
// =============================================================================

TEST(AsymptoticThroughput, FrozenArithmetic) {
    const auto v = asymptotic_user_throughput({1000.0, 0.9, 1.0}, AsymptoticBranch::rho_one);
    EXPECT_NEAR(v.value, 12.080765639882515, 1e-9);
    EXPECT_FALSE(v.low_u0_warning);
}

TEST(AsymptoticThroughput, CorrectionVanishesAsAlphaApproachesOne) {
    const double s = 1e6;
    const auto one =
        asymptotic_user_throughput({std::sqrt(s), 0.999999999, 1.0}, AsymptoticBranch::rho_one);
    EXPECT_NEAR(one.value, std::log(s / 2.0), 1e-3);
    const auto small =
        asymptotic_user_throughput({std::sqrt(s), 0.999999999, 1.0}, AsymptoticBranch::rho_small);
    EXPECT_NEAR(small.value, std::log(s), 1e-2);
}

TEST(AsymptoticThroughput, GapToExactSolverShrinksWithGain) {
    double prev = 1e300;
    for (double u0sq : {1e3, 1e4, 1e6}) {
        const OptimalityInputs in{std::sqrt(u0sq), 0.9, 1.0};
        const OperatingPoint op = solve_operating_point(in);
        ASSERT_EQ(op.status, SolveStatus::ok);
        const auto asym = asymptotic_user_throughput(in, AsymptoticBranch::rho_one);
        const double rel_gap = std::abs(op.throughput - asym.value) / op.throughput;
        EXPECT_LT(rel_gap, prev);
        prev = rel_gap;
    }
}

TEST(AsymptoticThroughput, FlagsWeakGain) {
    EXPECT_TRUE(asymptotic_user_throughput({9.0, 0.9, 1.0}, AsymptoticBranch::rho_one)
                    .low_u0_warning);
    EXPECT_THROW(asymptotic_user_throughput({100.0, 1.0, 1.0}, AsymptoticBranch::rho_one),
                 std::invalid_argument);
}
