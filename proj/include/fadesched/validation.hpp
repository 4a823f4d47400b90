// Independent oracles and the bundled self-check suite. Everything here
// cross-checks the library through a second route (brute-force search,
// quadrature, series, Monte Carlo) and stays off the implementation paths it
// judges, so the checks would catch a broken kernel, solver or closed form.
#pragma once

#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <gsl/gsl_sf_gamma.h>

#include "fadesched/asymptotics.hpp"
#include "fadesched/link_optimizer.hpp"
#include "fadesched/quadrature.hpp"
#include "fadesched/scheduler.hpp"

namespace fadesched {

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Power-series evaluation of e^{-z} I_0(z) (200 terms). Slow but independent
/// of the production Bessel routine; usable for moderate z.
inline double i0_scaled_series_oracle(double z) {
    double term = 1.0, series = 1.0;
    const double q = z * z / 4.0;
    for (int k = 1; k <= 200; ++k) {
        term *= q / (static_cast<double>(k) * static_cast<double>(k));
        series += term;
    }
    return series * std::exp(-z);
}

/// The raw throughput objective R (1 - e^{-N rho (beta - log(1+rho))}) with
/// the Gallager parameter optimized pointwise. This is what the operating
/// point solver is supposed to maximize; the grid oracle below searches it
/// exhaustively instead of trusting the stationarity system.
inline double throughput_objective(double rate, double length, const OptimalityInputs& in) {
    const double beta =
        std::log(in.power * in.u0 * in.u0) + (length + 1.0) * std::log(in.alpha) - rate;
    const double rho = optimal_rho(beta);
    if (rho <= 0.0) return 0.0;
    const double gap = rho * (beta - std::log1p(rho));
    return rate * (1.0 - std::exp(-length * gap));
}

struct GridOraclePoint {
    double throughput = 0.0;
    int length = 1;
    double rate = 0.0;
};

/// Brute-force maximization of the throughput objective over integer lengths
/// and a dense rate grid.
inline GridOraclePoint grid_oracle(const OptimalityInputs& in, int max_length = 200,
                                   int rate_points = 2000) {
    GridOraclePoint best;
    const double rate_max = std::log(in.power * in.u0 * in.u0);
    for (int n = 1; n <= max_length; ++n) {
        for (int j = 1; j <= rate_points; ++j) {
            const double rate = rate_max * static_cast<double>(j) / rate_points;
            const double t = throughput_objective(rate, n, in);
            if (t > best.throughput) best = {t, n, rate};
        }
    }
    return best;
}

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

namespace detail {

inline long sample_binomial_inversion(long k, double p, SplitRng& rng) {
    const double u = rng.uniform();
    double pmf = std::exp(static_cast<double>(k) * std::log1p(-p));
    double cdf = pmf;
    long n = 0;
    while (u > cdf && n < k) {
        pmf *= static_cast<double>(k - n) / static_cast<double>(n + 1) * p / (1.0 - p);
        ++n;
        cdf += pmf;
    }
    return n;
}

} // namespace detail

/// Monte-Carlo oracle for E{log(1/alpha_max)}: per trial, |S| ~ Binomial(K,
/// e^{-theta}) users clear the bar, their alphas are uniform draws, and an
/// empty set contributes zero.
inline McEstimate mc_log_inv_alpha_max(long k, double theta, long trials, SplitRng& rng) {
    const double p = std::exp(-theta);
    double sum = 0.0, sum_sq = 0.0;
    for (long t = 0; t < trials; ++t) {
        const long n = detail::sample_binomial_inversion(k, p, rng);
        double value = 0.0;
        if (n >= 1) {
            double amax = 0.0;
            for (long j = 0; j < n; ++j) amax = std::max(amax, rng.uniform());
            value = std::log(1.0 / amax);
        }
        sum += value;
        sum_sq += value * value;
    }
    const double m = static_cast<double>(trials);
    McEstimate est;
    est.mean = sum / m;
    const double var = std::max(0.0, (sum_sq - m * est.mean * est.mean) / (m - 1.0));
    est.std_error = std::sqrt(var / m);
    return est;
}

/// Pearson chi-squared goodness-of-fit p-value for binned samples against
/// expected bin probabilities (which should include the whole support).
/// Adjacent bins are pooled until every cell has expected count >= 5, the
/// usual validity condition for the chi-squared approximation.
inline double chi_squared_gof_pvalue(const std::vector<long>& counts,
                                     const std::vector<double>& probs, long total) {
    std::vector<double> cell_count, cell_expected;
    double pooled_count = 0.0, pooled_expected = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        pooled_count += static_cast<double>(counts[i]);
        pooled_expected += probs[i] * static_cast<double>(total);
        if (pooled_expected >= 5.0) {
            cell_count.push_back(pooled_count);
            cell_expected.push_back(pooled_expected);
            pooled_count = 0.0;
            pooled_expected = 0.0;
        }
    }
    if (pooled_expected > 0.0 && !cell_expected.empty()) {
        cell_count.back() += pooled_count;
        cell_expected.back() += pooled_expected;
    }
    if (cell_expected.size() < 2) return 1.0;
    double stat = 0.0;
    for (std::size_t i = 0; i < cell_expected.size(); ++i) {
        const double d = cell_count[i] - cell_expected[i];
        stat += d * d / cell_expected[i];
    }
    const double dof = static_cast<double>(cell_expected.size()) - 1.0;
    detail::gsl_quiet();
    return gsl_sf_gamma_inc_Q(0.5 * dof, 0.5 * stat);
}

/// Bins samples on edges [e0..em] (everything past the last edge lands in a
/// final overflow bin) and tests against the density via per-bin quadrature.
inline double density_gof_pvalue(const std::vector<double>& samples,
                                 const std::function<double(double)>& density,
                                 const std::vector<double>& edges) {
    std::vector<long> counts(edges.size(), 0);
    for (double s : samples) {
        std::size_t bin = edges.size() - 1;
        for (std::size_t i = 1; i < edges.size(); ++i) {
            if (s < edges[i]) {
                bin = i - 1;
                break;
            }
        }
        if (s >= edges.back()) bin = edges.size() - 1;
        ++counts[bin];
    }
    std::vector<double> probs(edges.size(), 0.0);
    double covered = 0.0;
    for (std::size_t i = 1; i < edges.size(); ++i) {
        probs[i - 1] = detail::integrate(density, edges[i - 1], edges[i], 1e-12, 1e-9);
        covered += probs[i - 1];
    }
    probs[edges.size() - 1] = std::max(0.0, 1.0 - covered);
    return chi_squared_gof_pvalue(counts, probs, static_cast<long>(samples.size()));
}

// ---------------------------------------------------------------------------
// Bundled self-check suite
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    double tolerance = 0.0;
    double measured = 0.0;
    bool pass = false;
    std::string note;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline void add_check(ValidationReport& rep, const std::string& name, double measured,
                      double tolerance, bool pass, std::string note = {}) {
    rep.checks.push_back({name, tolerance, measured, pass, std::move(note)});
}

inline void add_upper_bound_check(ValidationReport& rep, const std::string& name, double measured,
                                  double tolerance, std::string note = {}) {
    add_check(rep, name, measured, tolerance, measured <= tolerance, std::move(note));
}

} // namespace detail

/**
 * Runs the oracle suite. quick mode trims sample counts for a fast smoke
 * pass; full mode uses the sizes the per-module tolerances were set for.
 * Everything is deterministic in the seed.
 */
inline ValidationReport run_validation(bool quick, std::uint64_t seed = 0xFADE5EEDULL) {
    ValidationReport rep;

    // --- density normalizations ------------------------------------------
    {
        const double total = detail::integrate_to_inf([](double u) { return initial_density(u); },
                                                       0.0, 1e-14, 1e-12);
        detail::add_upper_bound_check(rep, "initial-density-normalization",
                                      std::abs(total - 1.0), 1e-10);
    }
    {
        double worst = 0.0;
        for (double alpha : {0.1, 0.5, 0.9}) {
            for (double v : {0.5, 1.0, 3.0}) {
                const FadingParams params{alpha};
                const auto f = [&](double u) { return transition_density(u, v, params); };
                const double cut = alpha * v + 10.0 * std::sqrt((1.0 - alpha * alpha) / 2.0);
                const double total = detail::integrate(f, 0.0, cut, 1e-13, 1e-11) +
                                     detail::integrate_to_inf(f, cut, 1e-13, 1e-11);
                worst = std::max(worst, std::abs(total - 1.0));
            }
        }
        detail::add_upper_bound_check(rep, "transition-density-normalization", worst, 1e-6,
                                      "max over alpha in {.1,.5,.9}, v in {.5,1,3}");
    }
    {
        const FadingParams params{1e-6};
        double worst = 0.0;
        for (double v : {0.5, 2.0, 4.0}) {
            for (double u = 0.0; u <= 5.0; u += 0.01) {
                worst = std::max(worst,
                                 std::abs(transition_density(u, v, params) - initial_density(u)));
            }
        }
        detail::add_upper_bound_check(rep, "transition-memoryless-limit", worst, 1e-6,
                                      "alpha = 1e-6 vs stationary density");
    }
    {
        const double z = 1e4;
        const double identity = i0_scaled(z) * std::sqrt(2.0 * M_PI * z);
        detail::add_upper_bound_check(rep, "bessel-scaled-asymptotic", std::abs(identity - 1.0),
                                      1e-4, "e^{-z} I0(z) sqrt(2 pi z) at z = 1e4");
    }

    // --- sampler statistics ------------------------------------------------
    {
        const long draws = quick ? 200000 : 1000000;
        SplitRng rng = SplitRng::substream(seed, 1, 0);
        double sum = 0.0, sum_sq = 0.0;
        for (long i = 0; i < draws; ++i) {
            const double u = sample_initial(rng);
            sum += u;
            sum_sq += u * u;
        }
        const double mean = sum / draws;
        const double second = sum_sq / draws;
        const double mean_tol = quick ? 0.005 : 0.002;
        const double second_tol = quick ? 0.012 : 0.005;
        detail::add_upper_bound_check(rep, "rayleigh-sampler-mean",
                                      std::abs(mean - std::sqrt(M_PI) / 2.0), mean_tol);
        detail::add_upper_bound_check(rep, "rayleigh-sampler-power", std::abs(second - 1.0),
                                      second_tol);
    }
    {
        // conditional one-step law vs the transition kernel
        const long draws = quick ? 20000 : 100000;
        const double u0 = 1.5, alpha = 0.8;
        const FadingParams params{alpha};
        SplitRng rng = SplitRng::substream(seed, 2, 0);
        std::vector<double> samples;
        samples.reserve(static_cast<std::size_t>(draws));
        for (long i = 0; i < draws; ++i) {
            samples.push_back(sample_trace(u0, 1, params, rng).gains[0]);
        }
        std::vector<double> edges;
        for (double e = 0.0; e <= 3.2001; e += 0.08) edges.push_back(e);
        const double p = density_gof_pvalue(
            samples, [&](double u) { return transition_density(u, u0, params); }, edges);
        detail::add_check(rep, "sampler-gof-conditional", p, 0.01, p >= 0.01,
                          "chi-squared p-value, reject below 0.01");
    }
    {
        // pooled stationary marginal over a long trace, thinned so the
        // chi-squared test sees effectively independent draws
        const long length = quick ? 200000 : 800000;
        const int thin = 20;  // alpha^20 ~ 8e-4 at alpha = 0.7
        const double alpha = 0.7;
        const FadingParams params{alpha};
        SplitRng rng = SplitRng::substream(seed, 3, 0);
        const double u0 = sample_initial(rng);
        const ChannelTrace trace = sample_trace(u0, static_cast<int>(length), params, rng);
        std::vector<double> samples;
        for (std::size_t i = thin - 1; i < trace.gains.size(); i += thin)
            samples.push_back(trace.gains[i]);
        std::vector<double> edges;
        for (double e = 0.0; e <= 2.8001; e += 0.07) edges.push_back(e);
        const double p =
            density_gof_pvalue(samples, [](double u) { return initial_density(u); }, edges);
        detail::add_check(rep, "sampler-gof-stationary", p, 0.01, p >= 0.01,
                          "thinned pooled marginal, reject below 0.01");
    }

    // --- closed-form exponent vs conditional Monte Carlo -------------------
    {
        const int samples = quick ? 20000 : 100000;
        const double u0 = 20.0;
        const FadingParams params{0.99};
        double worst = 0.0;
        SplitRng rng = SplitRng::substream(seed, 4, 0);
        for (double rho : {0.5, 1.0}) {
            const auto mc = exponent_exact_mc(rho, u0, params, 20, 1.0, samples, rng);
            const auto cf = exponent_theorem1(rho, u0, params, 20, 1.0);
            const double band = std::max(3.0 * mc.std_error, 0.05 * std::abs(mc.value));
            worst = std::max(worst, std::abs(cf.value - mc.value) / band);
        }
        detail::add_upper_bound_check(rep, "theorem1-vs-mc-agreement", worst, 1.0,
                                      "u0=20 alpha=0.99 n=20; band = max(3 se, 5%)");
    }
    {
        const int samples = quick ? 10000 : 30000;
        double mean_rel[3] = {0.0, 0.0, 0.0};
        const double u0s[3] = {5.0, 10.0, 20.0};
        SplitRng rng = SplitRng::substream(seed, 5, 0);
        for (int ui = 0; ui < 3; ++ui) {
            int combos = 0;
            for (double alpha : {0.9, 0.99}) {
                for (int n : {10, 50}) {
                    for (double rho : {0.5, 1.0}) {
                        const FadingParams params{alpha};
                        const auto mc =
                            exponent_exact_mc(rho, u0s[ui], params, n, 1.0, samples, rng);
                        const auto cf = exponent_theorem1(rho, u0s[ui], params, n, 1.0);
                        mean_rel[ui] += std::abs(cf.value - mc.value) / std::abs(mc.value);
                        ++combos;
                    }
                }
            }
            mean_rel[ui] /= combos;
        }
        const double drop = std::min(mean_rel[0] - mean_rel[1], mean_rel[1] - mean_rel[2]);
        detail::add_check(rep, "theorem1-vs-mc-u0-trend", drop, 0.0, drop > 0.0,
                          "mean relative error must fall as u0 grows 5 -> 10 -> 20");
    }

    // --- Gallager parameter solver -----------------------------------------
    {
        SplitRng rng = SplitRng::substream(seed, 6, 0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double beta = rng.uniform() * rho_saturation_beta;
            if (beta <= 0.0) continue;
            const double rho = optimal_rho(beta);
            worst = std::max(worst,
                             std::abs(std::log1p(rho) + rho / (1.0 + rho) - beta));
        }
        detail::add_upper_bound_check(rep, "rho-solver-residual", worst, 1e-10,
                                      "1000 random beta in (0, log 2 + 1/2)");
        const double at_zero = optimal_rho(1e-12);
        const double at_sat = 1.0 - optimal_rho(rho_saturation_beta - 1e-12);
        detail::add_upper_bound_check(rep, "rho-solver-boundary",
                                      std::max(at_zero, std::abs(at_sat)), 1e-9,
                                      "continuity at both branch boundaries");
    }

    // --- operating-point solver vs exhaustive grid --------------------------
    {
        const int instances = quick ? 8 : 50;
        const int max_length = quick ? 120 : 200;
        const int rate_points = quick ? 500 : 2000;
        SplitRng rng = SplitRng::substream(seed, 7, 0);
        double worst_ratio = 2.0;
        for (int i = 0; i < instances; ++i) {
            const double u0sq = std::pow(10.0, 2.0 + 4.0 * rng.uniform());
            const double alpha = 0.5 + 0.495 * rng.uniform();
            const OptimalityInputs in{std::sqrt(u0sq), alpha, 1.0};
            const OperatingPoint op = solve_operating_point(in);
            const GridOraclePoint grid = grid_oracle(in, max_length, rate_points);
            if (grid.throughput <= 0.0) continue;
            worst_ratio = std::min(worst_ratio, op.throughput / grid.throughput);
        }
        detail::add_check(rep, "fixed-point-vs-grid", worst_ratio, 0.99, worst_ratio >= 0.99,
                          "min solver/grid throughput ratio over random instances");
    }

    // --- above-threshold correlation statistics -----------------------------
    {
        double worst = 0.0;
        for (double theta : {0.5, 2.0, 5.0}) {
            const double q = -std::expm1(-theta);  // 1 - e^-theta
            double prev = mean_log_inv_alpha_max_exact(1, theta);
            for (long k = 2; k <= 100; ++k) {
                const double cur = mean_log_inv_alpha_max_exact(k, theta);
                const double recursed = q * prev + 1.0 / static_cast<double>(k) -
                                        std::exp(static_cast<double>(k) * std::log(q)) /
                                            static_cast<double>(k);
                worst = std::max(worst, std::abs(cur - recursed));
                prev = cur;
            }
        }
        detail::add_upper_bound_check(rep, "alpha-max-recursion", worst, 1e-12,
                                      "closed form satisfies the K-recursion");
    }
    {
        const long trials = quick ? 100000 : 1000000;
        SplitRng rng = SplitRng::substream(seed, 8, 0);
        double worst = 0.0;
        std::vector<std::pair<long, double>> cases = {{50, 2.0}, {200, 3.0}};
        if (!quick) cases.emplace_back(1000, feedback_threshold(1000));
        for (const auto& [k, theta] : cases) {
            const double exact = mean_log_inv_alpha_max_exact(k, theta);
            const McEstimate mc = mc_log_inv_alpha_max(k, theta, trials, rng);
            worst = std::max(worst, std::abs(exact - mc.mean) / (3.0 * mc.std_error));
        }
        detail::add_upper_bound_check(rep, "alpha-max-vs-mc", worst, 1.0,
                                      "|exact - MC| within 3 MC standard errors");
    }
    {
        const double theta4 = feedback_threshold(10000);
        const double theta6 = feedback_threshold(1000000);
        const double exact4 = mean_log_inv_alpha_max_exact(10000, theta4);
        const double exact6 = mean_log_inv_alpha_max_exact(1000000, theta6);
        const double rel4 = std::abs(mean_log_inv_alpha_max_approx(10000, theta4) - exact4) / exact4;
        const double rel6 =
            std::abs(mean_log_inv_alpha_max_approx(1000000, theta6) - exact6) / exact6;
        detail::add_check(rep, "alpha-max-approx", rel4, 0.10, rel4 <= 0.10 && rel6 < rel4,
                          "rel err 10% at K=1e4 and shrinking at K=1e6");
    }

    // --- law constants -------------------------------------------------------
    {
        const double e_sqrt = detail::integrate_to_inf(
            [](double x) { return std::sqrt(x) * std::exp(-x); }, 0.0, 1e-13, 1e-11);
        const double constant = 2.0 * (1.0 - e_sqrt);
        detail::add_upper_bound_check(rep, "jensen-gap-constant", std::abs(constant - 0.2276),
                                      1e-3, "2 (sqrt(E X) - E sqrt X), X ~ Exp(1)");
    }

    return rep;
}

inline void write_report(const ValidationReport& rep, std::ostream& os) {
    for (const auto& c : rep.checks) {
        os << (c.pass ? "PASS" : "FAIL") << "  " << std::left << std::setw(34) << c.name
           << " measured=" << std::setprecision(6) << c.measured
           << " tolerance=" << c.tolerance;
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << '\n';
    }
    os << (rep.all_pass() ? "all checks passed" : "CHECKS FAILED") << '\n';
}

} // namespace fadesched
