// Closed-form large-population throughput laws for the three scheduling
// rules, the exact and approximate mean of log(1/alpha_max) over the
// above-threshold set, and the alpha-distribution moments the laws consume.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <gsl/gsl_sf_gamma.h>

#include "fadesched/fading_channel.hpp"
#include "fadesched/quadrature.hpp"

namespace fadesched {

namespace detail {

inline void check_law_args(double k, double p, const char* where) {
    require(k >= 16.0, std::string(where) + ": needs at least 16 users");
    require(p > 0.0, std::string(where) + ": power must be positive");
}

inline double harmonic_number(long k) {
    if (k <= 1000000L) {
        double h = 0.0;
        for (long n = 1; n <= k; ++n) h += 1.0 / static_cast<double>(n);
        return h;
    }
    constexpr double euler_gamma = 0.5772156649015328606;
    const double kd = static_cast<double>(k);
    return std::log(kd) + euler_gamma + 1.0 / (2.0 * kd);
}

} // namespace detail

/// Mean throughput law for max-SNR scheduling at the optimal common length:
///   log(P log K / 2) - 2 sqrt(E{log(1/alpha)} logloglog K).
inline double law_max_snr_fixed(double k, double p, double e_log_alpha_inv) {
    detail::check_law_args(k, p, "law_max_snr_fixed");
    detail::require(e_log_alpha_inv >= 0.0, "law_max_snr_fixed: moment must be nonnegative");
    const double lll = std::log(std::log(std::log(k)));
    return std::log(p * std::log(k) / 2.0) - 2.0 * std::sqrt(e_log_alpha_inv * lll);
}

/// Mean throughput law for max-SNR scheduling with per-user length:
///   log(P log K / 2) - 2 E{sqrt(log(1/alpha))} sqrt(loglog(P log K / 2)).
inline double law_max_snr_adaptive(double k, double p, double e_sqrt_log_alpha_inv) {
    detail::check_law_args(k, p, "law_max_snr_adaptive");
    detail::require(e_sqrt_log_alpha_inv >= 0.0,
                    "law_max_snr_adaptive: moment must be nonnegative");
    const double lead = p * std::log(k) / 2.0;
    // the correction's loglog argument goes negative below P log K / 2 ~ e;
    // clamping it at zero keeps the law defined at desk-scale K and equal to
    // the formula everywhere the formula makes sense
    const double loglog = std::max(0.0, std::log(std::max(1e-300, std::log(lead))));
    return std::log(lead) - 2.0 * e_sqrt_log_alpha_inv * std::sqrt(loglog);
}

/// Quasi-static ceiling log(P log K): the throughput the threshold rule
/// approaches, and the reference every strategy is gapped against.
inline double law_quasi_static_max(double k, double p) {
    detail::check_law_args(k, p, "law_quasi_static_max");
    return std::log(p * std::log(k));
}

/**
 * Exact E{log(1/alpha_max)} when each of K users independently clears a
 * squared-gain threshold theta with probability e^{-theta} and alphas are
 * uniform:
 *
 *   sum_{n=1..K} (1/n) (1-e^{-theta})^{K-n}  -  (1-e^{-theta})^K H_K.
 *
 * Powers go through exp(m log1p(-e^{-theta})) so large K and theta cannot
 * underflow prematurely. Empty feedback sets contribute zero, matching the
 * n >= 1 summation.
 */
inline double mean_log_inv_alpha_max_exact(long k, double theta) {
    detail::require(k >= 1, "mean_log_inv_alpha_max_exact: k must be positive");
    detail::require(theta > 0.0, "mean_log_inv_alpha_max_exact: theta must be positive");
    const double log_q = std::log1p(-std::exp(-theta));  // log(1 - e^-theta)
    double head = 0.0;
    const long limit = std::min(k, 1000000L);
    for (long n = k; n >= k - limit + 1; --n) {
        const double m = static_cast<double>(k - n);
        const double term = std::exp(m * log_q) / static_cast<double>(n);
        head += term;
        if (term < 1e-20 * head) break;  // geometric tail is spent
    }
    const double tail = std::exp(static_cast<double>(k) * log_q) * detail::harmonic_number(k);
    return head - tail;
}

/// Leading-order approximation of the same mean for large K:
///   1/(K e^{-theta}) + e^{-K e^{-theta}} (theta - log K).
/// Flagged inputs with K e^{-theta} < 1 sit outside its accuracy regime.
inline double mean_log_inv_alpha_max_approx(long k, double theta) {
    detail::require(k >= 1, "mean_log_inv_alpha_max_approx: k must be positive");
    detail::require(theta > 0.0, "mean_log_inv_alpha_max_approx: theta must be positive");
    const double m = static_cast<double>(k) * std::exp(-theta);
    return 1.0 / m + std::exp(-m) * (theta - std::log(static_cast<double>(k)));
}

enum class AlphaMoment {
    log_inv,       ///< E{log(1/alpha)}
    sqrt_log_inv,  ///< E{sqrt(log(1/alpha))}
    cbrt_log_inv,  ///< E{cbrt(log(1/alpha))}
};

/// Moments for the uniform alpha law, where log(1/alpha) ~ Exp(1):
/// E{X^s} = Gamma(1+s).
inline double alpha_moment_uniform(AlphaMoment which) {
    switch (which) {
        case AlphaMoment::log_inv: return 1.0;
        case AlphaMoment::sqrt_log_inv: return gsl_sf_gamma(1.5);
        case AlphaMoment::cbrt_log_inv: return gsl_sf_gamma(4.0 / 3.0);
    }
    return 0.0;
}

/**
 * Moments E{(log(1/alpha))^s} for a caller-supplied alpha CDF on (0,1),
 * via the tail identity E{X^s} = int_0^inf s t^{s-1} F(e^{-t}) dt.
 * Distributions with mass at 0 or at 1 are rejected: an atom at 1 makes
 * the fading quasi-static and an atom at 0 makes the moment integral
 * divergent-dominated, and neither is covered by the scaling laws.
 */
inline double alpha_moment(const std::function<double(double)>& cdf, AlphaMoment which) {
    detail::require(cdf(0.0) <= 0.0, "alpha_moment: distribution has mass at 0");
    detail::require(1.0 - cdf(1.0 - 1e-9) <= 1e-4, "alpha_moment: distribution has mass at 1");
    const double s = which == AlphaMoment::log_inv    ? 1.0
                     : which == AlphaMoment::sqrt_log_inv ? 0.5
                                                          : 1.0 / 3.0;
    const auto integrand = [&](double t) {
        return s * std::pow(t, s - 1.0) * cdf(std::exp(-t));
    };
    // t^{s-1} is integrably singular at 0 for s < 1; split the endpoint off
    return detail::integrate(integrand, 0.0, 1.0, 1e-12, 1e-10) +
           detail::integrate_to_inf(integrand, 1.0, 1e-12, 1e-10);
}

} // namespace fadesched
