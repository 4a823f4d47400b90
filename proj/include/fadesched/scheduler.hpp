// Per-frame user selection rules over a population snapshot. All rules are
// deterministic functions of the snapshot (RNG never enters here); ties break
// toward the lowest user id.
#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "fadesched/link_optimizer.hpp"

namespace fadesched {

/// What the transmitter knows about one user at frame start.
struct UserState {
    int id = 0;
    double u0 = 0.0;    ///< fed-back fading magnitude
    double alpha = 0.9; ///< correlation coefficient, (0,1)
};

struct Population {
    std::vector<UserState> users;
    double power = 1.0;
};

enum class Strategy {
    max_snr_fixed_length,   ///< strongest gain, common codeword length
    max_snr_adaptive,       ///< strongest gain, per-user optimized design
    threshold_correlation,  ///< gain threshold, then slowest-fading user
    best_throughput,        ///< reference: argmax of the optimized throughput
};

// External tokens used in configs, CSV and JSON output.
inline const char* strategy_token(Strategy s) {
    switch (s) {
        case Strategy::max_snr_fixed_length: return "I";
        case Strategy::max_snr_adaptive: return "II";
        case Strategy::threshold_correlation: return "III";
        case Strategy::best_throughput: return "optimal-reference";
    }
    return "?";
}

inline std::optional<Strategy> strategy_from_token(std::string_view token) {
    if (token == "I") return Strategy::max_snr_fixed_length;
    if (token == "II") return Strategy::max_snr_adaptive;
    if (token == "III") return Strategy::threshold_correlation;
    if (token == "optimal-reference") return Strategy::best_throughput;
    return std::nullopt;
}

struct ScheduleOutcome {
    int chosen_id = 0;
    LinkDesign design;   ///< zero-rate/zero-throughput marker for unusable frames
    Strategy strategy = Strategy::max_snr_fixed_length;
    bool fallback_used = false;  ///< threshold rule fell back to max-SNR
};

namespace detail {

inline void check_population(const Population& pop, const char* where) {
    require(!pop.users.empty(), std::string(where) + ": population must be nonempty");
    require(pop.power > 0.0, std::string(where) + ": power must be positive");
}

inline const UserState& max_gain_user(const std::vector<const UserState*>& users) {
    const UserState* best = users.front();
    for (const UserState* u : users) {
        if (u->u0 > best->u0 || (u->u0 == best->u0 && u->id < best->id)) best = u;
    }
    return *best;
}

inline const UserState& max_alpha_user(const std::vector<const UserState*>& users) {
    const UserState* best = users.front();
    for (const UserState* u : users) {
        if (u->alpha > best->alpha || (u->alpha == best->alpha && u->id < best->id)) best = u;
    }
    return *best;
}

inline std::vector<const UserState*> all_users(const Population& pop) {
    std::vector<const UserState*> out;
    out.reserve(pop.users.size());
    for (const UserState& u : pop.users) out.push_back(&u);
    return out;
}

inline LinkDesign design_from_operating_point(const OperatingPoint& op, double power) {
    if (op.status == SolveStatus::no_positive_rate) {
        return {0.0, 1.0, 0.0, power, 0.0};
    }
    return {op.rate, op.length, op.rho, power, op.throughput};
}

} // namespace detail

/// Common codeword length for the fixed-length strategy,
///   max(1, round(sqrt(logloglog K / E{log(1/alpha)}))),
/// floored at 1 for populations too small for the triple log.
inline int fixed_codeword_length(int k_users, double mean_log_alpha_inv) {
    detail::require(k_users >= 1, "fixed_codeword_length: k_users must be positive");
    detail::require(mean_log_alpha_inv > 0.0,
                    "fixed_codeword_length: mean_log_alpha_inv must be positive");
    if (k_users < 16) return 1;
    const double lll = std::log(std::log(std::log(static_cast<double>(k_users))));
    if (lll <= 0.0) return 1;
    const long n = std::lround(std::sqrt(lll / mean_log_alpha_inv));
    return static_cast<int>(std::max(1L, n));
}

/// Feedback threshold on the squared gain for the correlation-aware rule:
/// log K - loglog K - logloglog K, floored at log(K)/2 where the triple log
/// is unavailable or the formula dips below it.
inline double feedback_threshold(int k_users) {
    detail::require(k_users >= 2, "feedback_threshold: k_users must be at least 2");
    const double log_k = std::log(static_cast<double>(k_users));
    const double floor_value = 0.5 * log_k;
    const double ll = std::log(log_k);
    if (ll <= 0.0) return floor_value;
    const double lll = std::log(ll);
    return std::max(floor_value, log_k - ll - lll);
}

/// Strongest-gain user, rate adapted at a common fixed codeword length.
inline ScheduleOutcome schedule_max_snr_fixed_length(const Population& pop, int codeword_length) {
    detail::check_population(pop, "schedule_max_snr_fixed_length");
    detail::require(codeword_length >= 1, "schedule_max_snr_fixed_length: length must be positive");
    const UserState& chosen = detail::max_gain_user(detail::all_users(pop));
    ScheduleOutcome out;
    out.strategy = Strategy::max_snr_fixed_length;
    out.chosen_id = chosen.id;
    out.design = {0.0, static_cast<double>(codeword_length), 0.0, pop.power, 0.0};
    if (chosen.u0 > 0.0) {
        const RateSolution rs =
            optimize_rate_for_length({chosen.u0, chosen.alpha, pop.power}, codeword_length);
        if (rs.status == SolveStatus::ok) {
            out.design.rate = rs.rate;
            out.design.rho = rs.rho;
            out.design.throughput = rs.throughput;
        }
    }
    return out;
}

/// Strongest-gain user with per-user jointly optimized rate and length.
inline ScheduleOutcome schedule_max_snr_adaptive(const Population& pop) {
    detail::check_population(pop, "schedule_max_snr_adaptive");
    const UserState& chosen = detail::max_gain_user(detail::all_users(pop));
    ScheduleOutcome out;
    out.strategy = Strategy::max_snr_adaptive;
    out.chosen_id = chosen.id;
    if (chosen.u0 > 0.0) {
        const OperatingPoint op = solve_operating_point({chosen.u0, chosen.alpha, pop.power});
        out.design = detail::design_from_operating_point(op, pop.power);
    } else {
        out.design = {0.0, 1.0, 0.0, pop.power, 0.0};
    }
    return out;
}

/// Users whose squared gain clears theta feed back; among them the most
/// correlated (slowest fading) one is served with an optimized design. If
/// nobody clears the bar the rule falls back to max-SNR adaptive so the
/// frame is never wasted; the fallback is flagged.
inline ScheduleOutcome schedule_threshold_correlation(const Population& pop, double theta) {
    detail::check_population(pop, "schedule_threshold_correlation");
    detail::require(theta > 0.0, "schedule_threshold_correlation: theta must be positive");
    std::vector<const UserState*> eligible;
    for (const UserState& u : pop.users) {
        if (u.u0 * u.u0 >= theta) eligible.push_back(&u);
    }
    if (eligible.empty()) {
        ScheduleOutcome out = schedule_max_snr_adaptive(pop);
        out.strategy = Strategy::threshold_correlation;
        out.fallback_used = true;
        return out;
    }
    const UserState& chosen = detail::max_alpha_user(eligible);
    ScheduleOutcome out;
    out.strategy = Strategy::threshold_correlation;
    out.chosen_id = chosen.id;
    const OperatingPoint op = solve_operating_point({chosen.u0, chosen.alpha, pop.power});
    out.design = detail::design_from_operating_point(op, pop.power);
    return out;
}

/// Reference rule: optimize every user and serve the best achievable
/// throughput. O(K) solves per frame, so it is a comparison baseline rather
/// than a practical scheduler.
inline ScheduleOutcome schedule_best_throughput(const Population& pop) {
    detail::check_population(pop, "schedule_best_throughput");
    ScheduleOutcome out;
    out.strategy = Strategy::best_throughput;
    bool have = false;
    for (const UserState& u : pop.users) {
        LinkDesign d{0.0, 1.0, 0.0, pop.power, 0.0};
        if (u.u0 > 0.0) {
            const OperatingPoint op = solve_operating_point({u.u0, u.alpha, pop.power});
            d = detail::design_from_operating_point(op, pop.power);
        }
        if (!have || d.throughput > out.design.throughput ||
            (d.throughput == out.design.throughput && u.id < out.chosen_id)) {
            out.chosen_id = u.id;
            out.design = d;
            have = true;
        }
    }
    return out;
}

} // namespace fadesched
