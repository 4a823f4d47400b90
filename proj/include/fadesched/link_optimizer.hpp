// Joint rate / codeword-length optimization for one user: the Gallager
// parameter characterization, the coupled (R, N) stationarity system, the
// closed-form throughput at the optimum, and its large-gain asymptotics.
#pragma once

#include <algorithm>
#include <cmath>

#include "fadesched/error_exponent.hpp"
#include "fadesched/fading_channel.hpp"

namespace fadesched {

/// Per-user channel knowledge the optimizer works from.
struct OptimalityInputs {
    double u0 = 1.0;     ///< frame-start fading magnitude, > 0
    double alpha = 0.9;  ///< correlation coefficient, (0,1]; 1 = quasi-static
    double power = 1.0;  ///< transmit power P, > 0
};

enum class SolveStatus {
    ok,
    no_positive_rate,  ///< channel too poor for a positive operating rate
    non_convergence,   ///< iteration cap hit before the tolerance
};

namespace detail {

inline void check_inputs(const OptimalityInputs& in, const char* where) {
    require(in.u0 > 0.0, std::string(where) + ": u0 must be positive");
    require(in.power > 0.0, std::string(where) + ": power must be positive");
    require(in.alpha > 0.0 && in.alpha <= 1.0, std::string(where) + ": alpha must lie in (0,1]");
}

// log(1+rho) + rho/(1+rho), the strictly increasing LHS of the optimality
// condition for the Gallager parameter.
inline double rho_condition_lhs(double rho) {
    return std::log1p(rho) + rho / (1.0 + rho);
}

} // namespace detail

inline constexpr double rho_saturation_beta = 0.5 + 0.6931471805599453094;  // log(2) + 1/2

/**
 * Optimal Gallager parameter for a given beta = log(P u0^2) + (N+1) log(alpha) - R:
 * the root of log(1+rho) + rho/(1+rho) = beta on (0,1), saturating at the
 * endpoints. Bisection plus a few clipped Newton steps; the residual at the
 * returned point is far below 1e-10.
 */
inline double optimal_rho(double beta) {
    if (beta <= 0.0) return 0.0;
    if (beta >= rho_saturation_beta) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 30; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (detail::rho_condition_lhs(mid) < beta)
            lo = mid;
        else
            hi = mid;
    }
    double rho = 0.5 * (lo + hi);
    for (int i = 0; i < 4; ++i) {
        const double one_p = 1.0 + rho;
        const double deriv = 1.0 / one_p + 1.0 / (one_p * one_p);
        rho -= (detail::rho_condition_lhs(rho) - beta) / deriv;
        rho = std::clamp(rho, lo, hi);
    }
    return rho;
}

/// Optimal Gallager parameter expressed through the codeword length:
/// with x = n log(1/alpha), rho = x/(1-x) below x = 1/2 and 1 beyond.
inline double rho_from_length(double n, double alpha) {
    check_alpha_open(alpha, "rho_from_length");
    detail::require(n > 0.0, "rho_from_length: n must be positive");
    const double x = n * std::log(1.0 / alpha);
    return x < 0.5 ? x / (1.0 - x) : 1.0;
}

struct SolveOptions {
    int max_iterations = 500;
    double tolerance = 1e-9;  ///< on the length iterate
    double damping = 0.5;
    double quasi_static_length = 1e6;  ///< reported length cap for alpha = 1
};

/// Stationary rate at a frozen codeword length (used by the fixed-length
/// scheduling strategy and for the integer-length variant below).
struct RateSolution {
    SolveStatus status = SolveStatus::ok;
    double rate = 0.0;
    double rho = 0.0;
    double throughput = 0.0;
    int iterations = 0;
};

/**
 * Solves the rate stationarity at fixed length n by damped iteration of
 *
 *   R = log(P u0^2/(1+rho)) + (n+1) log(alpha) - log(1 + rho n R)/(rho n),
 *
 * with rho re-optimized from beta = log(P u0^2) + (n+1) log(alpha) - R at
 * every step. The penalty term tends to R as rho -> 0, which keeps the
 * iteration total for weak channels; a nonpositive fixed point is reported
 * as no_positive_rate and means the frame is wasted (throughput 0).
 */
inline RateSolution optimize_rate_for_length(const OptimalityInputs& in, double n,
                                             const SolveOptions& opts = {}) {
    detail::check_inputs(in, "optimize_rate_for_length");
    check_alpha_open(in.alpha, "optimize_rate_for_length");
    detail::require(n >= 1.0, "optimize_rate_for_length: n must be at least 1");

    RateSolution sol;
    const double log_s = std::log(in.power * in.u0 * in.u0);
    const double ceiling = log_s + (n + 1.0) * std::log(in.alpha);  // R + beta
    if (ceiling <= 0.0) {
        sol.status = SolveStatus::no_positive_rate;
        return sol;
    }

    const auto penalty = [&](double rho, double rate) {
        return rho > 1e-12 ? std::log1p(rho * n * rate) / (rho * n) : rate;
    };

    double rate = std::max(ceiling - std::log(2.0), 0.5 * ceiling);
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        sol.iterations = it + 1;
        const double rho = optimal_rho(ceiling - rate);
        const double next = ceiling - std::log1p(rho) - penalty(rho, rate);
        const double damped = (1.0 - opts.damping) * rate + opts.damping * next;
        const bool done = std::abs(damped - rate) <= opts.tolerance;
        rate = damped;
        if (done) {
            converged = true;
            break;
        }
    }
    if (!converged) sol.status = SolveStatus::non_convergence;

    sol.rate = rate;
    sol.rho = optimal_rho(ceiling - rate);
    if (rate <= 0.0 || sol.rho <= 0.0) {
        sol.status = SolveStatus::no_positive_rate;
        sol.rate = std::max(rate, 0.0);
        sol.throughput = 0.0;
        return sol;
    }
    const double gap = sol.rho * ((ceiling - rate) - std::log1p(sol.rho));
    sol.throughput = std::max(0.0, rate * (1.0 - std::exp(-n * gap)));
    return sol;
}

/// Closed-form throughput at a stationary operating point,
///   (log(P u0^2/(1+rho)) + (2N+1) log(alpha)) * (1 - 1/(1 + rho N R)),
/// clamped at zero (with a flag) when the leading factor goes negative.
struct ThroughputValue {
    double value = 0.0;
    bool clamped = false;
};

inline ThroughputValue throughput_closed_form(double rate, double length, double rho,
                                              const OptimalityInputs& in) {
    detail::check_inputs(in, "throughput_closed_form");
    detail::require(rho > 0.0 && rho <= 1.0, "throughput_closed_form: rho must lie in (0,1]");
    detail::require(length >= 1.0, "throughput_closed_form: length must be at least 1");
    detail::require(rate > 0.0, "throughput_closed_form: rate must be positive");
    const double lead = std::log(in.power * in.u0 * in.u0 / (1.0 + rho)) +
                        (2.0 * length + 1.0) * std::log(in.alpha);
    const double value = lead * (1.0 - 1.0 / (1.0 + rho * length * rate));
    if (value < 0.0) return {0.0, true};
    return {value, false};
}

/// Joint optimum over rate and (real-valued) codeword length, plus a rounded
/// integer-length variant evaluated through the honest error-bound route.
struct OperatingPoint {
    SolveStatus status = SolveStatus::ok;
    double rate = 0.0;
    double length = 1.0;  ///< real-valued optimizer output
    double rho = 0.0;
    double throughput = 0.0;
    int iterations = 0;
    bool quasi_static = false;     ///< alpha = 1 short-circuit taken
    bool length_clamped = false;   ///< interior point fell below N = 1; boundary solve used
    bool throughput_clamped = false;
    LinkDesign integer_design;     ///< best of floor/ceil lengths, bound-based throughput
};

namespace detail {

// Integer-length variant: re-solve the rate at floor/ceil of the real
// optimum and score each through exponent_theorem1 + pe_upper_bound.
inline LinkDesign round_length_variant(const OptimalityInputs& in, double real_length,
                                       const SolveOptions& opts) {
    LinkDesign best{0.0, std::max(1.0, std::floor(real_length)), 0.0, in.power, 0.0};
    const int lo = static_cast<int>(std::max(1.0, std::floor(real_length)));
    const int hi = static_cast<int>(std::max(1.0, std::ceil(real_length)));
    for (int n = lo; n <= hi; ++n) {
        const RateSolution rs = optimize_rate_for_length(in, n, opts);
        if (rs.status != SolveStatus::ok) continue;
        LinkDesign d{rs.rate, static_cast<double>(n), rs.rho, in.power, 0.0};
        const auto exponent = [&](double rho) {
            return exponent_theorem1(rho, in.u0, FadingParams{in.alpha}, n, in.power).value;
        };
        const double pe = pe_upper_bound(d, exponent, rs.rho);
        d.throughput = frame_throughput(d, pe);
        if (d.throughput >= best.throughput) best = d;
    }
    return best;
}

} // namespace detail

/**
 * Damped alternation for the coupled stationarity system: given the current
 * length N, the Gallager parameter follows from rho_from_length, the rate
 * from the rate stationarity, and the next length from
 *
 *   N = sqrt(log(1 + rho N R) / (rho log(1/alpha))),
 *
 * whose inner N is resolved by a one-dimensional sub-iteration. Starts from
 * the asymptotic scale sqrt(loglog(P u0^2)/log(1/alpha)).
 *
 * Channels too weak for an interior fixed point (P u0^2 <= e, or an iterate
 * that sinks below one channel use) are solved on the N = 1 boundary, so a
 * weak user still gets the best design a single channel use admits;
 * no_positive_rate is reported only when even that rate is nonpositive.
 * alpha = 1 short-circuits to the quasi-static capacity point rho = 0,
 * R = T = log(P u0^2).
 */
inline OperatingPoint solve_operating_point(const OptimalityInputs& in,
                                            const SolveOptions& opts = {}) {
    detail::check_inputs(in, "solve_operating_point");

    OperatingPoint op;
    const double s = in.power * in.u0 * in.u0;

    if (in.alpha == 1.0) {
        op.quasi_static = true;
        const double rate = std::log(s);
        if (rate <= 0.0) {
            op.status = SolveStatus::no_positive_rate;
            return op;
        }
        op.rate = rate;
        op.length = opts.quasi_static_length;
        op.rho = 0.0;
        op.throughput = rate;
        op.integer_design = {rate, opts.quasi_static_length, 0.0, in.power, rate};
        return op;
    }

    const auto boundary_solve = [&]() {
        op.length_clamped = true;
        op.length = 1.0;
        const RateSolution rs = optimize_rate_for_length(in, 1.0, opts);
        op.status = rs.status;
        op.rate = rs.rate;
        op.rho = rs.rho;
        op.throughput = rs.throughput;
        if (op.status == SolveStatus::ok)
            op.integer_design = detail::round_length_variant(in, 1.0, opts);
        return op;
    };

    if (s <= M_E) {
        // below the large-gain regime the length iteration has no interior
        // fixed point; the best admissible design sits on the N = 1 boundary
        return boundary_solve();
    }

    const double log_alpha_inv = std::log(1.0 / in.alpha);
    double length = std::sqrt(std::log(std::log(s)) / log_alpha_inv);
    double rate = 0.0;
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        op.iterations = it + 1;
        const double rho = rho_from_length(length, in.alpha);
        rate = std::log(s) - (2.0 * length + 1.0) * log_alpha_inv - std::log1p(rho);
        if (rate <= 0.0) {
            // interior stationarity collapsed; fall back to the constrained
            // boundary, which decides between a usable N = 1 design and a
            // genuine no_positive_rate verdict
            return boundary_solve();
        }
        double inner = length;
        for (int j = 0; j < 200; ++j) {
            const double next = std::sqrt(std::log1p(rho * inner * rate) / (rho * log_alpha_inv));
            const bool done = std::abs(next - inner) <= 1e-10;
            inner = next;
            if (done) break;
        }
        const double damped = (1.0 - opts.damping) * length + opts.damping * inner;
        const bool done = std::abs(damped - length) <= opts.tolerance;
        length = damped;
        if (done) {
            converged = true;
            break;
        }
    }
    if (!converged) op.status = SolveStatus::non_convergence;

    if (length < 1.0) {
        // the unconstrained stationary point sits below one channel use; the
        // objective is concave, so the constrained optimum is at N = 1
        return boundary_solve();
    }

    op.length = length;
    op.rho = rho_from_length(length, in.alpha);
    op.rate = std::log(s) - (2.0 * length + 1.0) * log_alpha_inv - std::log1p(op.rho);
    if (op.rate <= 0.0) {
        op.status = SolveStatus::no_positive_rate;
        return op;
    }
    const ThroughputValue tv = throughput_closed_form(op.rate, op.length, op.rho, in);
    op.throughput = tv.value;
    op.throughput_clamped = tv.clamped;
    op.integer_design = detail::round_length_variant(in, op.length, opts);
    return op;
}

enum class AsymptoticBranch {
    rho_one,   ///< saturated Gallager parameter (fast-decorrelating regime)
    rho_small, ///< vanishing N log(1/alpha) regime
};

struct AsymptoticThroughput {
    double value = 0.0;
    bool low_u0_warning = false;
};

/// Leading-order throughput of the jointly optimized link for large gains:
///   rho_one:   log(P u0^2 / 2) - 2 sqrt(log(1/alpha) loglog(P u0^2 / 2))
///   rho_small: log(P u0^2)     - 2 (log(1/alpha) loglog(P u0^2))^{1/3}
/// Correction terms are dropped; accuracy is flagged below u0^2 = 100.
inline AsymptoticThroughput asymptotic_user_throughput(const OptimalityInputs& in,
                                                       AsymptoticBranch branch) {
    detail::check_inputs(in, "asymptotic_user_throughput");
    check_alpha_open(in.alpha, "asymptotic_user_throughput");
    const double s = in.power * in.u0 * in.u0;
    AsymptoticThroughput out;
    out.low_u0_warning = in.u0 * in.u0 < 100.0;
    const double log_alpha_inv = std::log(1.0 / in.alpha);
    if (branch == AsymptoticBranch::rho_one) {
        detail::require(s > 2.0 * M_E, "asymptotic_user_throughput: needs P u0^2 > 2e");
        const double lead = std::log(s / 2.0);
        out.value = lead - 2.0 * std::sqrt(log_alpha_inv * std::log(lead));
    } else {
        detail::require(s > M_E, "asymptotic_user_throughput: needs P u0^2 > e");
        const double lead = std::log(s);
        out.value = lead - 2.0 * std::cbrt(log_alpha_inv * std::log(lead));
    }
    return out;
}

} // namespace fadesched
