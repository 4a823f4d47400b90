// Random-coding error exponent for the correlated-fading link, evaluated
// exactly by conditional Monte Carlo and in closed form for strong frame-start
// gains, plus the resulting frame-error bound and throughput.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "fadesched/fading_channel.hpp"
#include "fadesched/rng.hpp"

namespace fadesched {

/// An operating point: rate R (nats/use), codeword length N (channel uses,
/// kept real-valued; the optimizer reports a rounded variant separately),
/// Gallager parameter rho, transmit power P, and the throughput it achieves.
struct LinkDesign {
    double rate = 0.0;
    double length = 1.0;
    double rho = 0.0;
    double power = 1.0;
    double throughput = 0.0;
};

enum class ExponentMethod { exact_mc, theorem1 };

struct ExponentEstimate {
    double value = 0.0;      ///< E(rho), nats per channel use
    double std_error = 0.0;  ///< Monte-Carlo standard error; 0 for closed form
    ExponentMethod method = ExponentMethod::theorem1;
    bool low_u0_warning = false;  ///< closed form used outside its accuracy regime
};

/**
 * Exact exponent by conditional Monte Carlo:
 *
 *   E(rho) = -(1/n) log E{ prod_i (1 + P u_i^2/(1+rho))^{-rho} | u0 }
 *
 * with magnitude traces drawn from the Gauss-Markov chain started at u0.
 * The inner expectation is a mean of per-trace weights exp(L_j) with
 * L_j <= 0; it is accumulated as a log-sum-exp so that deeply faded traces
 * cannot underflow. The reported standard error is the delta-method error
 * of the log of the sample mean, which needs a decent sample count to mean
 * anything; fewer than 1000 samples is rejected.
 */
inline ExponentEstimate exponent_exact_mc(double rho, double u0, const FadingParams& params,
                                          int n, double power, int samples, SplitRng& rng) {
    detail::require(rho >= 0.0 && rho <= 1.0, "exponent_exact_mc: rho must lie in [0,1]");
    detail::require(u0 >= 0.0, "exponent_exact_mc: u0 must be nonnegative");
    detail::require(n >= 1, "exponent_exact_mc: n must be positive");
    detail::require(power >= 0.0, "exponent_exact_mc: power must be nonnegative");
    detail::require(samples >= 1000, "exponent_exact_mc: needs at least 1000 samples");
    check_alpha_open(params.alpha, "exponent_exact_mc");

    ExponentEstimate est;
    est.method = ExponentMethod::exact_mc;
    if (rho == 0.0 || power == 0.0) {
        return est;  // integrand is identically 1
    }

    const double a = params.alpha;
    const double sigma = std::sqrt(1.0 - a * a);
    const double snr = power / (1.0 + rho);

    std::vector<double> log_weights(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) {
        const double phase0 = 2.0 * M_PI * rng.uniform();
        std::complex<double> h = std::polar(u0, phase0);
        double lw = 0.0;
        for (int i = 0; i < n; ++i) {
            h = a * h + sigma * rng.complex_gaussian();
            lw -= rho * std::log1p(snr * std::norm(h));
        }
        log_weights[static_cast<std::size_t>(j)] = lw;
    }

    const double lmax = *std::max_element(log_weights.begin(), log_weights.end());
    double sum = 0.0, sum_sq = 0.0;
    for (double lw : log_weights) {
        const double w = std::exp(lw - lmax);
        sum += w;
        sum_sq += w * w;
    }
    const double m = static_cast<double>(samples);
    const double mean = sum / m;
    const double log_mean = lmax + std::log(mean);
    est.value = -log_mean / n;

    // var(log mean-hat) ~ var(w)/(m mean^2); the lmax shift cancels in the ratio
    const double var_w = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
    est.std_error = std::sqrt(var_w / m) / mean / n;
    return est;
}

/// Closed-form exponent for strong frame-start gains:
///   E(rho) = (1/n) sum_{i=1..n} rho log(1 + P u0^2 alpha^{2i}/(1+rho)).
/// The O(1/sqrt(u0)) and O(e^{-u0^2}) corrections are dropped; accuracy
/// degrades for weak gains, flagged below u0 = 3.
inline ExponentEstimate exponent_theorem1(double rho, double u0, const FadingParams& params,
                                          int n, double power) {
    detail::require(rho >= 0.0 && rho <= 1.0, "exponent_theorem1: rho must lie in [0,1]");
    detail::require(u0 > 0.0, "exponent_theorem1: u0 must be positive");
    detail::require(n >= 1, "exponent_theorem1: n must be positive");
    detail::require(power > 0.0, "exponent_theorem1: power must be positive");
    check_alpha_open(params.alpha, "exponent_theorem1");

    ExponentEstimate est;
    est.method = ExponentMethod::theorem1;
    est.low_u0_warning = u0 < 3.0;

    const double a2 = params.alpha * params.alpha;
    const double base = power * u0 * u0 / (1.0 + rho);
    double sum = 0.0;
    double decay = 1.0;
    for (int i = 1; i <= n; ++i) {
        decay *= a2;
        sum += std::log1p(base * decay);
    }
    est.value = rho * sum / n;
    return est;
}

/**
 * Frame-error upper bound  min(1, inf_{rho in [0,1]} exp(-N (E(rho) - rho R))).
 *
 * The gap E(rho) - rho R is concave in rho for the exponents used here, so a
 * golden-section search over [0,1] finds the infimum; the endpoints and an
 * optional caller-supplied rho candidate (the closed-form optimum, when one
 * is known) are folded in, and a few parabolic refinement steps polish the
 * maximizer.
 */
template <typename ExponentFn>
double pe_upper_bound(const LinkDesign& design, ExponentFn&& exponent_at, double rho_hint = -1.0) {
    const double n = design.length;
    const double rate = design.rate;
    const auto gap = [&](double rho) { return exponent_at(rho) - rho * rate; };

    double best_rho = 0.0;
    double best_gap = 0.0;  // gap(0) = 0 always
    const auto consider = [&](double rho) {
        if (rho < 0.0 || rho > 1.0) return;
        const double g = gap(rho);
        if (g > best_gap) {
            best_gap = g;
            best_rho = rho;
        }
    };
    consider(1.0);
    consider(rho_hint);

    // golden-section on [0,1]
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 1.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = gap(x1), f2 = gap(x2);
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = gap(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = gap(x1);
        }
    }
    consider(0.5 * (lo + hi));

    // parabolic polish around the incumbent
    double h = 1e-5;
    for (int it = 0; it < 4; ++it) {
        const double xm = best_rho;
        const double xl = std::max(0.0, xm - h);
        const double xr = std::min(1.0, xm + h);
        const double fl = gap(xl), fm = gap(xm), fr = gap(xr);
        const double denom = (xr - xm) * (fm - fl) - (xm - xl) * (fr - fm);
        if (std::abs(denom) > 0.0) {
            const double num =
                (xr - xm) * (xr + xm) * (fm - fl) - (xm - xl) * (xm + xl) * (fr - fm);
            consider(0.5 * num / denom);
        }
        h *= 0.1;
    }

    return std::min(1.0, std::exp(-n * best_gap));
}

/// Throughput delivered per channel use at frame error probability pe.
inline double frame_throughput(const LinkDesign& design, double pe) {
    detail::require(pe >= 0.0 && pe <= 1.0, "frame_throughput: pe must lie in [0,1]");
    return design.rate * (1.0 - pe);
}

} // namespace fadesched
