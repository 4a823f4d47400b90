// Seeded Monte-Carlo sweep driver: builds user populations, runs the
// scheduling strategies frame by frame, aggregates throughput statistics,
// and attaches the closed-form laws for comparison. Deterministic given the
// seed: every (K, trial) pair owns an independent RNG substream and results
// are merged from per-trial slots in a fixed order, so thread count cannot
// change any output bit.
#pragma once

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fadesched/asymptotics.hpp"
#include "fadesched/scheduler.hpp"

namespace fadesched {

enum class ExponentMode { theorem1, exact_mc };
enum class AlphaLaw { uniform };

struct SweepConfig {
    std::vector<long> k_values;
    double power = 1.0;
    long trials = 100;
    std::vector<Strategy> strategies = {Strategy::max_snr_fixed_length,
                                        Strategy::max_snr_adaptive,
                                        Strategy::threshold_correlation};
    std::uint64_t seed = 20250901ULL;
    AlphaLaw alpha_distribution = AlphaLaw::uniform;
    ExponentMode exponent_mode = ExponentMode::theorem1;
    long mc_samples = 2000;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void validate_config(const SweepConfig& cfg) {
    if (cfg.k_values.empty()) throw ConfigError("k_values must be nonempty");
    for (std::size_t i = 0; i < cfg.k_values.size(); ++i) {
        if (cfg.k_values[i] < 1) throw ConfigError("k_values entries must be positive");
        if (i > 0 && cfg.k_values[i] <= cfg.k_values[i - 1])
            throw ConfigError("k_values must be sorted strictly ascending");
    }
    if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
    if (cfg.power <= 0.0) throw ConfigError("power must be positive");
    if (cfg.strategies.empty()) throw ConfigError("strategies must be nonempty");
    if (cfg.exponent_mode == ExponentMode::exact_mc && cfg.mc_samples < 1000)
        throw ConfigError("mc_samples must be at least 1000 in exact_mc mode");
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
    std::istringstream ss(value);
    T out;
    ss >> out;
    if (ss.fail() || !(ss >> std::ws).eof())
        throw ConfigError("bad value '" + value + "' for key '" + key + "'");
    return out;
}

} // namespace detail

/// Flat key = value format, one entry per line, '#' comments. Keys mirror
/// SweepConfig fields exactly; anything else is an error.
inline SweepConfig parse_config(std::istream& is) {
    SweepConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key == "k_values") {
            cfg.k_values.clear();
            for (const auto& tok : detail::split_list(value))
                cfg.k_values.push_back(detail::parse_number<long>(tok, key));
        } else if (key == "power") {
            cfg.power = detail::parse_number<double>(value, key);
        } else if (key == "trials") {
            cfg.trials = detail::parse_number<long>(value, key);
        } else if (key == "strategies") {
            cfg.strategies.clear();
            for (const auto& tok : detail::split_list(value)) {
                const auto s = strategy_from_token(tok);
                if (!s) throw ConfigError("unknown strategy '" + tok + "'");
                cfg.strategies.push_back(*s);
            }
        } else if (key == "seed") {
            cfg.seed = detail::parse_number<std::uint64_t>(value, key);
        } else if (key == "alpha_distribution") {
            if (value != "uniform") throw ConfigError("unknown alpha_distribution '" + value + "'");
            cfg.alpha_distribution = AlphaLaw::uniform;
        } else if (key == "exponent_mode") {
            if (value == "theorem1")
                cfg.exponent_mode = ExponentMode::theorem1;
            else if (value == "exact_mc")
                cfg.exponent_mode = ExponentMode::exact_mc;
            else
                throw ConfigError("unknown exponent_mode '" + value + "'");
        } else if (key == "mc_samples") {
            cfg.mc_samples = detail::parse_number<long>(value, key);
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

inline SweepConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(f);
}

/// Aggregated statistics for one (K, strategy) cell.
struct StrategyAggregate {
    long k = 0;
    Strategy strategy = Strategy::max_snr_fixed_length;
    double mean_throughput = 0.0;
    double std_error = 0.0;
    double mean_u0sq = 0.0;
    double mean_alpha = 0.0;
    double fallback_rate = 0.0;
    double law_value = 0.0;
    double gap = 0.0;  ///< (quasi-static ceiling - mean) / sqrt(logloglog K)
};

struct SweepResult {
    SweepConfig config;
    std::vector<StrategyAggregate> rows;  ///< K-major, strategy order as configured
};

namespace detail {

struct TrialRecord {
    double throughput = 0.0;
    double u0sq = 0.0;
    double alpha = 0.0;
    bool fallback = false;
};

inline Population draw_population(long k, double power, SplitRng& rng) {
    Population pop;
    pop.power = power;
    pop.users.reserve(static_cast<std::size_t>(k));
    for (long i = 0; i < k; ++i) {
        const double u0 = sample_initial(rng);
        double alpha = rng.uniform();
        while (alpha <= 0.0) alpha = rng.uniform();  // keep alpha in (0,1)
        pop.users.push_back({static_cast<int>(i), u0, alpha});
    }
    return pop;
}

// Frame-error bound with the exponent estimated from conditional MC traces.
// The traces are drawn once (they do not depend on rho), so the rho search
// in pe_upper_bound sees a smooth deterministic function.
inline double mc_bound_throughput(const LinkDesign& design, const UserState& user, double power,
                                  long samples, SplitRng& rng) {
    if (design.rate <= 0.0) return 0.0;
    const int n = static_cast<int>(std::max(1L, std::lround(design.length)));
    const double a = user.alpha;
    const double sigma = std::sqrt(1.0 - a * a);
    std::vector<double> sq_gains(static_cast<std::size_t>(samples) * n);
    for (long j = 0; j < samples; ++j) {
        std::complex<double> h = std::polar(user.u0, 2.0 * M_PI * rng.uniform());
        for (int i = 0; i < n; ++i) {
            h = a * h + sigma * rng.complex_gaussian();
            sq_gains[static_cast<std::size_t>(j) * n + i] = std::norm(h);
        }
    }
    const auto exponent = [&](double rho) {
        if (rho <= 0.0) return 0.0;
        const double c = power / (1.0 + rho);
        double lmax = -std::numeric_limits<double>::infinity();
        std::vector<double> lw(static_cast<std::size_t>(samples));
        for (long j = 0; j < samples; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                acc -= rho * std::log1p(c * sq_gains[static_cast<std::size_t>(j) * n + i]);
            lw[static_cast<std::size_t>(j)] = acc;
            if (acc > lmax) lmax = acc;
        }
        double sum = 0.0;
        for (double v : lw) sum += std::exp(v - lmax);
        return -(lmax + std::log(sum / static_cast<double>(samples))) / n;
    };
    LinkDesign d = design;
    d.length = n;
    const double pe = pe_upper_bound(d, exponent, design.rho);
    return frame_throughput(d, pe);
}

inline TrialRecord run_frame(const Population& pop, Strategy strategy, int fixed_length,
                             double theta, const SweepConfig& cfg, SplitRng& rng) {
    ScheduleOutcome outcome;
    switch (strategy) {
        case Strategy::max_snr_fixed_length:
            outcome = schedule_max_snr_fixed_length(pop, fixed_length);
            break;
        case Strategy::max_snr_adaptive:
            outcome = schedule_max_snr_adaptive(pop);
            break;
        case Strategy::threshold_correlation:
            outcome = schedule_threshold_correlation(pop, theta);
            break;
        case Strategy::best_throughput:
            outcome = schedule_best_throughput(pop);
            break;
    }
    // draw_population assigns ids 0..K-1 in order, so the id doubles as index
    const UserState& chosen = pop.users[static_cast<std::size_t>(outcome.chosen_id)];
    TrialRecord rec;
    rec.u0sq = chosen.u0 * chosen.u0;
    rec.alpha = chosen.alpha;
    rec.fallback = outcome.fallback_used;
    rec.throughput = outcome.design.throughput;
    if (cfg.exponent_mode == ExponentMode::exact_mc && outcome.design.rate > 0.0) {
        rec.throughput =
            mc_bound_throughput(outcome.design, chosen, cfg.power, cfg.mc_samples, rng);
    }
    return rec;
}

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FADESCHED_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

} // namespace detail

/**
 * Runs the configured sweep. For every (K, trial) a fresh population is
 * drawn from the substream indexed by (seed, K, trial); each requested
 * strategy schedules one frame on that same snapshot; the chosen user's
 * throughput (by the configured exponent mode), gain, correlation and the
 * threshold-rule fallback flag are recorded. threads <= 0 means: honor
 * FADESCHED_THREADS, else use the hardware count.
 *
 * strategy1_length, when set, overrides the closed-form common codeword
 * length (supports the empirically calibrated mode).
 */
inline SweepResult run_sweep(const SweepConfig& cfg, int threads = 0,
                             std::optional<int> strategy1_length = std::nullopt) {
    validate_config(cfg);
    const int n_threads = detail::resolve_threads(threads);

    SweepResult result;
    result.config = cfg;

    for (long k : cfg.k_values) {
        const int fixed_length =
            strategy1_length.value_or(fixed_codeword_length(
                static_cast<int>(std::min<long>(k, std::numeric_limits<int>::max())),
                alpha_moment_uniform(AlphaMoment::log_inv)));
        const double theta = k >= 2 ? feedback_threshold(static_cast<int>(k)) : 0.5;

        const std::size_t n_strat = cfg.strategies.size();
        std::vector<detail::TrialRecord> records(static_cast<std::size_t>(cfg.trials) * n_strat);

        std::atomic<long> next_trial{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        const auto worker = [&] {
            try {
                for (;;) {
                    const long trial = next_trial.fetch_add(1);
                    if (trial >= cfg.trials) return;
                    SplitRng rng = SplitRng::substream(cfg.seed, static_cast<std::uint64_t>(k),
                                                       static_cast<std::uint64_t>(trial));
                    const Population pop = detail::draw_population(k, cfg.power, rng);
                    for (std::size_t s = 0; s < n_strat; ++s) {
                        records[static_cast<std::size_t>(trial) * n_strat + s] = detail::run_frame(
                            pop, cfg.strategies[s], fixed_length, theta, cfg, rng);
                    }
                }
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };

        if (n_threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(n_threads));
            for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (failure) std::rethrow_exception(failure);

        for (std::size_t s = 0; s < n_strat; ++s) {
            StrategyAggregate agg;
            agg.k = k;
            agg.strategy = cfg.strategies[s];
            double sum = 0.0, sum_u = 0.0, sum_a = 0.0;
            long fallbacks = 0;
            for (long t = 0; t < cfg.trials; ++t) {
                const auto& rec = records[static_cast<std::size_t>(t) * n_strat + s];
                sum += rec.throughput;
                sum_u += rec.u0sq;
                sum_a += rec.alpha;
                if (rec.fallback) ++fallbacks;
            }
            const double m = static_cast<double>(cfg.trials);
            agg.mean_throughput = sum / m;
            agg.mean_u0sq = sum_u / m;
            agg.mean_alpha = sum_a / m;
            agg.fallback_rate = static_cast<double>(fallbacks) / m;
            double ss = 0.0;
            for (long t = 0; t < cfg.trials; ++t) {
                const double d =
                    records[static_cast<std::size_t>(t) * n_strat + s].throughput -
                    agg.mean_throughput;
                ss += d * d;
            }
            agg.std_error = cfg.trials > 1 ? std::sqrt(ss / (m - 1.0)) / std::sqrt(m) : 0.0;

            const double kd = static_cast<double>(k);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            if (k >= 16) {
                switch (agg.strategy) {
                    case Strategy::max_snr_fixed_length:
                        agg.law_value = law_max_snr_fixed(
                            kd, cfg.power, alpha_moment_uniform(AlphaMoment::log_inv));
                        break;
                    case Strategy::max_snr_adaptive:
                        agg.law_value = law_max_snr_adaptive(
                            kd, cfg.power, alpha_moment_uniform(AlphaMoment::sqrt_log_inv));
                        break;
                    default:
                        agg.law_value = law_quasi_static_max(kd, cfg.power);
                        break;
                }
                const double lll = std::log(std::log(std::log(kd)));
                agg.gap = lll > 0.0
                              ? (law_quasi_static_max(kd, cfg.power) - agg.mean_throughput) /
                                    std::sqrt(lll)
                              : nan;
            } else {
                agg.law_value = nan;
                agg.gap = nan;
            }
            result.rows.push_back(agg);
        }
    }
    return result;
}

/// Calibrates the common codeword length empirically: simulates the
/// fixed-length rule for every candidate length and returns the argmax of
/// the mean throughput. Complements the closed-form rule, which is only
/// asymptotic.
inline int empirical_fixed_length(long k, double power, long trials, std::uint64_t seed,
                                  int max_length = 50) {
    detail::require(k >= 1 && trials >= 1 && max_length >= 1,
                    "empirical_fixed_length: bad arguments");
    std::vector<double> totals(static_cast<std::size_t>(max_length), 0.0);
    for (long trial = 0; trial < trials; ++trial) {
        SplitRng rng = SplitRng::substream(seed, static_cast<std::uint64_t>(k),
                                           static_cast<std::uint64_t>(trial));
        const Population pop = detail::draw_population(k, power, rng);
        const UserState& chosen = detail::max_gain_user(detail::all_users(pop));
        for (int n = 1; n <= max_length; ++n) {
            if (chosen.u0 <= 0.0) continue;
            const RateSolution rs = optimize_rate_for_length({chosen.u0, chosen.alpha, power}, n);
            if (rs.status == SolveStatus::ok)
                totals[static_cast<std::size_t>(n - 1)] += rs.throughput;
        }
    }
    int best = 1;
    for (int n = 2; n <= max_length; ++n) {
        if (totals[static_cast<std::size_t>(n - 1)] > totals[static_cast<std::size_t>(best - 1)])
            best = n;
    }
    return best;
}

namespace detail {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// CSV emission. Doubles carry 17 significant digits so files are bit-stable
/// across runs and thread counts.
inline void write_csv(const SweepResult& result, std::ostream& os) {
    os << "k,strategy,mean_throughput,stderr,mean_u0sq,mean_alpha,fallback_rate,law_value,gap\n";
    for (const auto& row : result.rows) {
        os << row.k << ',' << strategy_token(row.strategy) << ','
           << detail::format_g17(row.mean_throughput) << ',' << detail::format_g17(row.std_error)
           << ',' << detail::format_g17(row.mean_u0sq) << ','
           << detail::format_g17(row.mean_alpha) << ','
           << detail::format_g17(row.fallback_rate) << ','
           << detail::format_g17(row.law_value) << ',' << detail::format_g17(row.gap) << '\n';
    }
}

inline nlohmann::ordered_json to_json(const SweepResult& result) {
    nlohmann::ordered_json cfg;
    cfg["k_values"] = result.config.k_values;
    cfg["power"] = result.config.power;
    cfg["trials"] = result.config.trials;
    std::vector<std::string> strategy_tokens;
    for (Strategy s : result.config.strategies) strategy_tokens.emplace_back(strategy_token(s));
    cfg["strategies"] = strategy_tokens;
    cfg["seed"] = result.config.seed;
    cfg["alpha_distribution"] = "uniform";
    cfg["exponent_mode"] =
        result.config.exponent_mode == ExponentMode::theorem1 ? "theorem1" : "exact_mc";
    cfg["mc_samples"] = result.config.mc_samples;

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : result.rows) {
        nlohmann::ordered_json r;
        r["k"] = row.k;
        r["strategy"] = strategy_token(row.strategy);
        r["mean_throughput"] = row.mean_throughput;
        r["stderr"] = row.std_error;
        r["mean_u0sq"] = row.mean_u0sq;
        r["mean_alpha"] = row.mean_alpha;
        r["fallback_rate"] = row.fallback_rate;
        r["law_value"] = row.law_value;
        r["gap"] = row.gap;
        rows.push_back(r);
    }
    nlohmann::ordered_json out;
    out["config"] = cfg;
    out["seed"] = result.config.seed;
    out["results"] = rows;
    return out;
}

inline void write_json(const SweepResult& result, std::ostream& os) {
    os << to_json(result).dump(2) << '\n';
}

} // namespace fadesched
