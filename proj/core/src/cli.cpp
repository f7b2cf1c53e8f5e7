#include "awd3/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "awd3/bias_stats.hpp"
#include "awd3/checkpoint.hpp"
#include "awd3/config_io.hpp"
#include "awd3/envs.hpp"
#include "awd3/errors.hpp"
#include "awd3/run_io.hpp"
#include "awd3/verify.hpp"

namespace awd3 {

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& what) {
    std::vector<double> out;
    for (const std::string& item : split_list(csv)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad " + what + " list entry: '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError(what + " list is empty");
    return out;
}

// The AgentConfig keys a user may override with --key value; values run
// through the same parser as config files, so both layers accept the same
// spellings. Keys that only matter for the beta mechanism are marked so the
// CLI can reject them for algorithms without one.
struct ConfigFlag {
    std::string key;
    bool beta_only = false;
    bool requires_adaptive = false; // only meaningful when beta actually updates
};

const std::vector<ConfigFlag>& config_flags() {
    static const std::vector<ConfigFlag> flags = {
        {"gamma"}, {"tau"}, {"actor_lr"}, {"critic_lr"}, {"batch_size"},
        {"policy_delay"}, {"exploration_noise_std"}, {"target_noise_std"},
        {"target_noise_clip"},
        {"beta_init", true}, {"beta_min", true}, {"beta_max", true},
        {"beta_lr", true, true}, {"beta_warmup_steps", true, true},
        {"beta_update_mode", true, true}, {"beta_batch_size", true, true},
        {"beta_buffer_capacity", true, true},
        {"exploration_phase_steps"}, {"total_steps"}, {"eval_interval"},
        {"eval_episodes"}, {"hidden1"}, {"hidden2"}, {"replay_capacity"},
        {"bias_interval"}, {"bias_pairs"}, {"beta_trace_interval"},
    };
    return flags;
}

struct TrainArgs {
    std::string algo;
    std::string env;
    std::uint64_t seed = 0;
    std::string seeds_csv;
    long long steps = -1;
    std::string out_dir = "runs";
    std::string config_path;
    int workers = 1;
    std::map<std::string, std::string> overrides;
};

int cmd_train(const TrainArgs& args, std::ostream& out) {
    const Algorithm algo = algorithm_from_string(args.algo); // ConfigError -> usage
    if (!is_known_env(args.env)) throw ConfigError("unknown environment: " + args.env);

    AgentConfig config;
    config.algorithm = algo;
    if (!args.config_path.empty()) {
        std::ifstream file(args.config_path);
        if (!file) throw IoError("cannot open config file '" + args.config_path + "'");
        for (const auto& [k, v] : parse_config_text(file)) apply_config_entry(config, k, v);
    }
    for (const auto& [k, v] : args.overrides) apply_config_entry(config, k, v);
    config.algorithm = algo; // --algo wins over any file entry
    if (args.steps > 0) config.total_steps = args.steps;

    for (const ConfigFlag& flag : config_flags()) {
        if (!args.overrides.count(flag.key)) continue;
        if (flag.beta_only && !algorithm_uses_beta(algo))
            throw ConfigError("--" + flag.key + " requires an algorithm with a beta "
                              "mechanism (wd3 or awd3), got " + args.algo);
        if (flag.requires_adaptive && algo != Algorithm::awd3)
            throw ConfigError("--" + flag.key + " requires --algo awd3, got " + args.algo);
    }

    config.resolve_defaults();
    config.validate();

    std::vector<std::uint64_t> seeds;
    if (!args.seeds_csv.empty()) {
        for (const std::string& s : split_list(args.seeds_csv)) {
            try {
                seeds.push_back(std::stoull(s));
            } catch (const std::exception&) {
                throw ConfigError("bad --seeds entry: '" + s + "'");
            }
        }
    }
    if (seeds.empty()) seeds.push_back(args.seed);
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            if (seeds[i] == seeds[j])
                throw ConfigError("duplicate seed " + std::to_string(seeds[i]) +
                                  " would collide on artifact paths");

    const fs::path out_root(args.out_dir);
    std::error_code ec;
    fs::create_directories(out_root, ec);
    if (ec || !fs::is_directory(out_root))
        throw IoError("cannot create output directory '" + out_root.string() + "'");

    write_manifest(out_root, config, args.env, seeds);

    std::vector<RunArtifacts> results(seeds.size());
    std::vector<std::string> failures(seeds.size());
    const int workers = std::max(1, args.workers);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            try {
                const RunPaths paths = run_paths(out_root, algo, args.env, seeds[i]);
                results[i] = execute_run(config, args.env, seeds[i], paths);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    if (workers == 1 || seeds.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (!failures[i].empty())
            throw IoError("run with seed " + std::to_string(seeds[i]) +
                          " failed: " + failures[i]);

    // Per-seed best evaluation, then the cross-seed aggregate.
    std::vector<double> best(seeds.size(), 0.0);
    bool have_evals = true;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto& curve = results[i].learning_curve;
        if (curve.empty()) {
            have_evals = false;
            break;
        }
        best[i] = std::max_element(curve.begin(), curve.end(),
                                   [](const EvalRecord& a, const EvalRecord& b) {
                                       return a.mean_return < b.mean_return;
                                   })
                      ->mean_return;
        out << "seed " << seeds[i] << ": max average return "
            << csv_double(best[i]) << "\n";
    }
    if (have_evals) {
        double mean = 0.0;
        for (double b : best) mean += b;
        mean /= static_cast<double>(best.size());
        double sd = 0.0;
        if (best.size() > 1) {
            for (double b : best) sd += (b - mean) * (b - mean);
            sd = std::sqrt(sd / static_cast<double>(best.size() - 1));
        }
        out << args.algo << " " << args.env << ": max average return "
            << csv_double(mean) << " +/- " << csv_double(sd) << " over "
            << seeds.size() << " seeds\n";
    }
    out << "artifacts written to " << out_root.string() << "\n";
    return kExitOk;
}

struct BiasScanArgs {
    std::string mu_list = "-1,0,1";
    std::string sigma_list = "0.5,1,2";
    std::string rho_list = "-0.5,0,0.9";
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 0;
    std::string out_path;
};

int cmd_bias_scan(const BiasScanArgs& args, std::ostream& out) {
    const auto mus = parse_double_list(args.mu_list, "mu");
    const auto sigmas = parse_double_list(args.sigma_list, "sigma");
    const auto rhos = parse_double_list(args.rho_list, "rho");

    std::ofstream file;
    std::ostream* sink = &out;
    if (!args.out_path.empty()) {
        file.open(args.out_path, std::ios::trunc);
        if (!file) throw IoError("cannot write '" + args.out_path + "'");
        sink = &file;
    }

    *sink << "mu1,mu2,sigma1,sigma2,rho,expected_min,beta_opt,mc_mean,mc_stderr\n";
    std::uint64_t row_seed = args.seed;
    for (double mu : mus)
        for (double sigma : sigmas)
            for (double rho : rhos) {
                GaussianErrorModel model{mu, mu, sigma, sigma, rho};
                const double em = expected_min(model);
                const double beta = optimal_beta(model);
                const auto mc = mc_min_oracle(model, args.samples, row_seed++);
                *sink << csv_double(mu) << "," << csv_double(mu) << ","
                      << csv_double(sigma) << "," << csv_double(sigma) << ","
                      << csv_double(rho) << "," << csv_double(em) << ","
                      << csv_double(beta) << "," << csv_double(mc.mean) << ","
                      << csv_double(mc.std_error) << "\n";
            }
    return kExitOk;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
    const auto results = run_verification(options, out);
    const bool all_passed =
        std::all_of(results.begin(), results.end(),
                    [](const CheckResult& r) { return r.passed; });
    out << (all_passed ? "all checks passed" : "verification FAILED") << " ("
        << results.size() << " checks)\n";
    return all_passed ? kExitOk : kExitFailure;
}

struct EvalArgs {
    std::string checkpoint;
    int episodes = 10;
    std::uint64_t seed = 0;
};

int cmd_eval(const EvalArgs& args, std::ostream& out) {
    const AgentState state = load_checkpoint(args.checkpoint);
    auto env = make_env(state.env_name);
    Rng rng = Rng::stream(args.seed, 8);
    const EvalRecord rec = evaluate_policy(state.actor, *env, args.episodes, rng);
    out << "env " << state.env_name << " algorithm "
        << to_string(state.config.algorithm) << " step " << state.t << "\n";
    out << "mean_return " << csv_double(rec.mean_return) << " +/- "
        << csv_double(rec.std_return) << " over " << args.episodes << " episodes\n";
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"awd3lab: adaptive weighted twin-critic continuous control at desk scale"};
    app.require_subcommand(1);

    TrainArgs train_args;
    std::map<std::string, std::string> override_values;
    CLI::App* train_cmd =
        app.add_subcommand("train", "Train one or more seeds and write CSV artifacts");
    train_cmd->add_option("--algo", train_args.algo, "ddpg|td3|wd3|awd3|tcd3")->required();
    train_cmd->add_option("--env", train_args.env, "pendulum|pointgoal2d|quadbandit")
        ->required();
    train_cmd->add_option("--seed", train_args.seed, "run seed");
    train_cmd->add_option("--seeds", train_args.seeds_csv, "comma-separated seed list");
    train_cmd->add_option("--steps", train_args.steps, "total environment steps");
    train_cmd->add_option("--out", train_args.out_dir, "output directory");
    train_cmd->add_option("--config", train_args.config_path,
                          "key=value config file (flags win)");
    train_cmd->add_option("--workers", train_args.workers,
                          "parallel seed runs (isolated workers)");
    for (const ConfigFlag& flag : config_flags())
        train_cmd->add_option("--" + flag.key, override_values[flag.key]);

    BiasScanArgs scan_args;
    CLI::App* scan_cmd = app.add_subcommand(
        "bias-scan", "Closed-form expected min, optimal weighting and sampling "
                     "oracle over a parameter grid");
    scan_cmd->add_option("--mu", scan_args.mu_list, "comma-separated shared means");
    scan_cmd->add_option("--sigma", scan_args.sigma_list, "comma-separated deviations");
    scan_cmd->add_option("--rho", scan_args.rho_list, "comma-separated correlations");
    scan_cmd->add_option("--samples", scan_args.samples, "oracle draws per grid point");
    scan_cmd->add_option("--seed", scan_args.seed, "oracle seed");
    scan_cmd->add_option("--out", scan_args.out_path, "CSV path (stdout when absent)");

    VerifyOptions verify_options;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "Run the property suite and print a pass/fail table");
    verify_cmd->add_option("--filter", verify_options.filter, "only checks whose name "
                                                              "contains this substring");
    verify_cmd->add_option("--inject-fault", verify_options.inject_fault)
        ->group(""); // test hook, hidden from help

    EvalArgs eval_args;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Evaluate a checkpoint with the noise-free policy");
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "checkpoint path")
        ->required();
    eval_cmd->add_option("--episodes", eval_args.episodes, "evaluation episodes");
    eval_cmd->add_option("--seed", eval_args.seed, "evaluation seed");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) {
            for (const auto& [k, v] : override_values)
                if (train_cmd->count("--" + k) > 0) train_args.overrides[k] = v;
            return cmd_train(train_args, out);
        }
        if (scan_cmd->parsed()) return cmd_bias_scan(scan_args, out);
        if (verify_cmd->parsed()) return cmd_verify(verify_options, out);
        if (eval_cmd->parsed()) return cmd_eval(eval_args, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    err << "error: no subcommand given\n";
    return kExitUsage;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace awd3
