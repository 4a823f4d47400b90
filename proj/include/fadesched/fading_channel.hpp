// Time-correlated Rayleigh fading: magnitude densities and the complex
// first-order Gauss-Markov sampler whose magnitude chain matches them.
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_sf_bessel.h>

#include "fadesched/rng.hpp"

namespace fadesched {

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

} // namespace detail

/// Gauss-Markov chain parameters. alpha is the per-symbol correlation
/// coefficient; the sampled process is h_i = alpha*h_{i-1} + sqrt(1-alpha^2)*w_i.
struct FadingParams {
    double alpha = 0.9;
};

inline void check_alpha_open(double alpha, const char* where) {
    detail::require(alpha > 0.0 && alpha < 1.0,
                    std::string(where) + ": alpha must lie in (0,1), got " + std::to_string(alpha));
}

/// One sampled fading realization: the known frame-start magnitude plus the
/// per-symbol magnitudes over the codeword.
struct ChannelTrace {
    double u0 = 0.0;
    std::vector<double> gains;
};

/// Exponentially scaled modified Bessel function, e^{-z} I_0(z).
/// Needed because the transition kernel's Bessel argument grows like
/// alpha*u*v/(1-alpha^2) and unscaled I_0 overflows past z ~ 700.
inline double i0_scaled(double z) {
    detail::require(z >= 0.0, "i0_scaled: z must be nonnegative");
    return gsl_sf_bessel_I0_scaled(z);
}

/// Stationary magnitude density 2u e^{-u^2} (unit-power Rayleigh).
inline double initial_density(double u) {
    if (u < 0.0) return 0.0;
    return 2.0 * u * std::exp(-u * u);
}

/// One-step magnitude transition density q(u | v).
/// Written as (2u/(1-a^2)) * exp(-(u-a v)^2/(1-a^2)) * i0_scaled(2 a u v/(1-a^2)),
/// which is the textbook Rician kernel with the Bessel growth cancelled
/// against the Gaussian factor, so it stays finite for any u, v.
inline double transition_density(double u, double v, const FadingParams& params) {
    check_alpha_open(params.alpha, "transition_density");
    detail::require(v >= 0.0, "transition_density: v must be nonnegative");
    if (u < 0.0) return 0.0;
    const double a = params.alpha;
    const double om = 1.0 - a * a;
    const double d = u - a * v;
    return (2.0 * u / om) * std::exp(-d * d / om) * i0_scaled(2.0 * a * u * v / om);
}

/// Draw from the stationary magnitude law by inverse CDF: u = sqrt(-log(1-x)).
inline double sample_initial(SplitRng& rng) {
    return std::sqrt(-std::log1p(-rng.uniform()));
}

/// Complex Gauss-Markov recursion h_i = a h_{i-1} + sqrt(1-a^2) w_i,
/// returning h_1..h_n. The magnitude chain of this recursion has exactly
/// the transition_density kernel (checked by goodness-of-fit tests rather
/// than assumed), and sampling it costs O(1) per step.
inline std::vector<std::complex<double>> sample_complex_chain(std::complex<double> h0, int n,
                                                              const FadingParams& params,
                                                              SplitRng& rng) {
    check_alpha_open(params.alpha, "sample_complex_chain");
    detail::require(n >= 1, "sample_complex_chain: n must be positive");
    const double a = params.alpha;
    const double sigma = std::sqrt(1.0 - a * a);
    std::vector<std::complex<double>> chain(static_cast<std::size_t>(n));
    std::complex<double> h = h0;
    for (int i = 0; i < n; ++i) {
        h = a * h + sigma * rng.complex_gaussian();
        chain[static_cast<std::size_t>(i)] = h;
    }
    return chain;
}

/// Magnitude trace u_1..u_n conditioned on the frame-start magnitude u0 and
/// initial phase phase0.
inline ChannelTrace sample_trace(double u0, double phase0, int n, const FadingParams& params,
                                 SplitRng& rng) {
    detail::require(u0 >= 0.0, "sample_trace: u0 must be nonnegative");
    const std::complex<double> h0 = std::polar(u0, phase0);
    ChannelTrace trace;
    trace.u0 = u0;
    trace.gains.reserve(static_cast<std::size_t>(n));
    for (const auto& h : sample_complex_chain(h0, n, params, rng)) {
        trace.gains.push_back(std::abs(h));
    }
    return trace;
}

/// Same, with the initial phase drawn uniform on [0, 2pi). Magnitude
/// statistics do not depend on the phase convention.
inline ChannelTrace sample_trace(double u0, int n, const FadingParams& params, SplitRng& rng) {
    const double phase0 = 2.0 * M_PI * rng.uniform();
    return sample_trace(u0, phase0, n, params, rng);
}

} // namespace fadesched
