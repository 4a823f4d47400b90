// Command-line front end: exponent curves, single-user optimization,
// Monte-Carlo sweeps, the self-check suite, and the closed-form laws.
//
// Exit codes: 0 success, 1 validation failure, 2 bad configuration/usage.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fadesched/sim_harness.hpp"
#include "fadesched/validation.hpp"

namespace {

std::vector<long> parse_k_list(const std::string& csv) {
    std::vector<long> out;
    for (const auto& tok : fadesched::detail::split_list(csv)) {
        out.push_back(fadesched::detail::parse_number<long>(tok, "k-list"));
    }
    return out;
}

int cmd_exponent(double u0, double alpha, int n, double power, int rho_points,
                 const std::string& mode, int samples, std::uint64_t seed) {
    using namespace fadesched;
    if (rho_points < 2) throw ConfigError("rho-grid needs at least 2 points");
    const FadingParams params{alpha};
    SplitRng rng = SplitRng::substream(seed, 0, 0);
    std::printf("rho,exponent,std_error,method\n");
    for (int i = 0; i < rho_points; ++i) {
        const double rho = static_cast<double>(i) / (rho_points - 1);
        ExponentEstimate est;
        if (mode == "theorem1") {
            est = exponent_theorem1(rho, u0, params, n, power);
        } else if (mode == "exact_mc") {
            est = exponent_exact_mc(rho, u0, params, n, power, samples, rng);
        } else {
            throw ConfigError("unknown mode '" + mode + "'");
        }
        std::printf("%.17g,%.17g,%.17g,%s\n", rho, est.value, est.std_error,
                    est.method == ExponentMethod::theorem1 ? "theorem1" : "exact_mc");
    }
    return 0;
}

int cmd_optimize(double u0, double alpha, double power) {
    using namespace fadesched;
    const OperatingPoint op = solve_operating_point({u0, alpha, power});
    nlohmann::ordered_json j;
    j["status"] = op.status == SolveStatus::ok                ? "ok"
                  : op.status == SolveStatus::no_positive_rate ? "no_positive_rate"
                                                               : "non_convergence";
    j["rate"] = op.rate;
    j["length"] = op.length;
    j["rho"] = op.rho;
    j["throughput"] = op.throughput;
    j["iterations"] = op.iterations;
    j["quasi_static"] = op.quasi_static;
    j["integer_design"] = {{"rate", op.integer_design.rate},
                           {"length", op.integer_design.length},
                           {"rho", op.integer_design.rho},
                           {"throughput", op.integer_design.throughput}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_simulate(const fadesched::SweepConfig& cfg, const std::string& out_path,
                 const std::string& json_path, int threads, const std::string& strategy1_mode,
                 long strategy1_trials) {
    using namespace fadesched;
    std::optional<int> fixed_override;
    if (strategy1_mode == "empirical") {
        // calibrate on the largest K; the argmax is flat across desk-scale K
        const long k = cfg.k_values.back();
        fixed_override = empirical_fixed_length(k, cfg.power, strategy1_trials, cfg.seed);
        std::cerr << "empirical strategy-I length: " << *fixed_override << '\n';
    } else if (strategy1_mode != "formula") {
        throw ConfigError("unknown strategy1-mode '" + strategy1_mode + "'");
    }

    const SweepResult result = run_sweep(cfg, threads, fixed_override);
    if (out_path.empty() || out_path == "-") {
        write_csv(result, std::cout);
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file '" + out_path + "'");
        write_csv(result, f);
    }
    if (!json_path.empty()) {
        std::ofstream f(json_path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file '" + json_path + "'");
        write_json(result, f);
    }
    return 0;
}

int cmd_validate(bool quick, std::uint64_t seed) {
    const fadesched::ValidationReport rep = fadesched::run_validation(quick, seed);
    fadesched::write_report(rep, std::cout);
    return rep.all_pass() ? 0 : 1;
}

int cmd_laws(const std::vector<long>& ks, double power) {
    using namespace fadesched;
    std::printf("k,law_I,law_II,law_max\n");
    for (long k : ks) {
        const double kd = static_cast<double>(k);
        std::printf("%ld,%.17g,%.17g,%.17g\n", k,
                    law_max_snr_fixed(kd, power, alpha_moment_uniform(AlphaMoment::log_inv)),
                    law_max_snr_adaptive(kd, power,
                                         alpha_moment_uniform(AlphaMoment::sqrt_log_inv)),
                    law_quasi_static_max(kd, power));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiuser downlink scheduling simulator over correlated Rayleigh fading"};
    app.require_subcommand(1);

    // exponent
    auto* exponent = app.add_subcommand("exponent", "error exponent curve for one link");
    double e_u0 = 10.0, e_alpha = 0.9, e_power = 1.0;
    int e_n = 20, e_rho_points = 11, e_samples = 100000;
    std::string e_mode = "theorem1";
    std::uint64_t e_seed = 1;
    exponent->add_option("--u0", e_u0, "frame-start fading magnitude")->required();
    exponent->add_option("--alpha", e_alpha, "correlation coefficient in (0,1)")->required();
    exponent->add_option("--n", e_n, "codeword length")->required();
    exponent->add_option("--power", e_power, "transmit power");
    exponent->add_option("--rho-grid", e_rho_points, "number of rho grid points on [0,1]");
    exponent->add_option("--mode", e_mode, "theorem1 or exact_mc");
    exponent->add_option("--samples", e_samples, "Monte-Carlo samples (exact_mc)");
    exponent->add_option("--seed", e_seed, "RNG seed (exact_mc)");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "jointly optimal rate/length for one user");
    double o_u0 = 100.0, o_alpha = 0.9, o_power = 1.0;
    optimize->add_option("--u0", o_u0, "frame-start fading magnitude")->required();
    optimize->add_option("--alpha", o_alpha, "correlation coefficient in (0,1]")->required();
    optimize->add_option("--power", o_power, "transmit power");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo strategy sweep");
    std::string s_config, s_k_list, s_strategies, s_out, s_json_out;
    std::string s_exponent_mode = "theorem1", s_strategy1_mode = "formula";
    long s_trials = -1, s_mc_samples = -1, s_strategy1_trials = 200;
    double s_power = -1.0;
    std::uint64_t s_seed = 0;
    bool s_seed_set = false;
    int s_threads = 0;
    simulate->add_option("--config", s_config, "config file (key = value lines)");
    simulate->add_option("--k-list", s_k_list, "comma-separated user counts, ascending");
    simulate->add_option("--trials", s_trials, "population redraws per K");
    simulate->add_option("--seed", s_seed, "master RNG seed")->each([&](const std::string&) {
        s_seed_set = true;
    });
    simulate->add_option("--strategies", s_strategies,
                         "comma-separated subset of I,II,III,optimal-reference");
    simulate->add_option("--power", s_power, "transmit power");
    simulate->add_option("--exponent-mode", s_exponent_mode, "theorem1 or exact_mc");
    simulate->add_option("--mc-samples", s_mc_samples, "Monte-Carlo samples (exact_mc)");
    simulate->add_option("--out", s_out, "CSV output path ('-' for stdout)");
    simulate->add_option("--json-out", s_json_out, "JSON summary output path");
    simulate->add_option("--threads", s_threads,
                         "worker threads (0 = FADESCHED_THREADS or hardware)");
    simulate->add_option("--strategy1-mode", s_strategy1_mode,
                         "fixed-length selection: formula or empirical");
    simulate->add_option("--strategy1-trials", s_strategy1_trials,
                         "calibration trials for the empirical mode");

    // validate
    auto* validate = app.add_subcommand("validate", "run the oracle self-check suite");
    bool v_quick = false, v_full = false;
    std::uint64_t v_seed = 0xFADE5EEDULL;
    validate->add_flag("--quick", v_quick, "reduced sample counts");
    validate->add_flag("--full", v_full, "full sample counts (default)");
    validate->add_option("--seed", v_seed, "RNG seed");

    // laws
    auto* laws = app.add_subcommand("laws", "closed-form throughput laws for a K list");
    std::string l_k_list;
    double l_power = 1.0;
    laws->add_option("--k-list", l_k_list, "comma-separated user counts")->required();
    laws->add_option("--power", l_power, "transmit power");

    try {
        app.parse(argc, argv);

        if (exponent->parsed())
            return cmd_exponent(e_u0, e_alpha, e_n, e_power, e_rho_points, e_mode, e_samples,
                                e_seed);
        if (optimize->parsed()) return cmd_optimize(o_u0, o_alpha, o_power);
        if (simulate->parsed()) {
            fadesched::SweepConfig cfg;
            if (!s_config.empty()) cfg = fadesched::parse_config_file(s_config);
            if (!s_k_list.empty()) cfg.k_values = parse_k_list(s_k_list);
            if (s_trials > 0) cfg.trials = s_trials;
            if (s_seed_set) cfg.seed = s_seed;
            if (s_power > 0.0) cfg.power = s_power;
            if (s_mc_samples > 0) cfg.mc_samples = s_mc_samples;
            if (!s_strategies.empty()) {
                cfg.strategies.clear();
                for (const auto& tok : fadesched::detail::split_list(s_strategies)) {
                    const auto s = fadesched::strategy_from_token(tok);
                    if (!s) throw fadesched::ConfigError("unknown strategy '" + tok + "'");
                    cfg.strategies.push_back(*s);
                }
            }
            if (s_exponent_mode == "theorem1")
                cfg.exponent_mode = fadesched::ExponentMode::theorem1;
            else if (s_exponent_mode == "exact_mc")
                cfg.exponent_mode = fadesched::ExponentMode::exact_mc;
            else
                throw fadesched::ConfigError("unknown exponent-mode '" + s_exponent_mode + "'");
            fadesched::validate_config(cfg);
            return cmd_simulate(cfg, s_out, s_json_out, s_threads, s_strategy1_mode,
                                s_strategy1_trials);
        }
        if (validate->parsed()) return cmd_validate(v_quick && !v_full, v_seed);
        if (laws->parsed()) return cmd_laws(parse_k_list(l_k_list), l_power);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const fadesched::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
