#include "awd3/run_io.hpp"

#include <charconv>
#include <chrono>
#include <fstream>

#include <json.hpp>

#include "awd3/checkpoint.hpp"
#include "awd3/config_io.hpp"
#include "awd3/env.hpp"
#include "awd3/errors.hpp"

namespace awd3 {

namespace fs = std::filesystem;

std::string csv_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

namespace {
std::ofstream open_artifact(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write artifact '" + path.string() + "'");
    return out;
}
} // namespace

void write_learning_curve_csv(const fs::path& path, const std::vector<EvalRecord>& records) {
    auto out = open_artifact(path);
    out << "step,mean_return,std_return\n";
    for (const auto& r : records)
        out << r.step << "," << csv_double(r.mean_return) << ","
            << csv_double(r.std_return) << "\n";
}

void write_beta_trace_csv(const fs::path& path, const std::vector<BetaRecord>& records) {
    auto out = open_artifact(path);
    out << "step,beta\n";
    for (const auto& r : records) out << r.step << "," << csv_double(r.beta) << "\n";
}

void write_bias_csv(const fs::path& path, const std::vector<BiasRecord>& records) {
    auto out = open_artifact(path);
    out << "step,estimated_q_mean,true_q_mean,bias,n_pairs\n";
    for (const auto& r : records)
        out << r.step << "," << csv_double(r.estimated_q_mean) << ","
            << csv_double(r.true_q_mean) << "," << csv_double(r.bias) << ","
            << r.n_pairs << "\n";
}

void write_terminal_errors_csv(const fs::path& path,
                               const std::vector<TerminalErrorRecord>& records) {
    auto out = open_artifact(path);
    out << "step,reward,estimate\n";
    for (const auto& r : records)
        out << r.step << "," << csv_double(r.reward) << "," << csv_double(r.estimate)
            << "\n";
}

RunPaths run_paths(const fs::path& out_root, Algorithm algo, const std::string& env_name,
                   std::uint64_t seed) {
    RunPaths p;
    p.dir = out_root / (to_string(algo) + "_" + env_name + "_" + std::to_string(seed));
    p.learning_curve = p.dir / "learning_curve.csv";
    p.beta_trace = p.dir / "beta_trace.csv";
    p.bias = p.dir / "bias.csv";
    p.terminal_errors = p.dir / "terminal_errors.csv";
    p.checkpoint = p.dir / "checkpoint.ckpt";
    return p;
}

RunArtifacts execute_run(const AgentConfig& config, const std::string& env_name,
                         std::uint64_t seed, const RunPaths& paths) {
    std::error_code ec;
    fs::create_directories(paths.dir, ec);
    if (ec) throw IoError("cannot create run directory '" + paths.dir.string() + "'");

    RunArtifacts artifacts =
        train(config, [&] { return make_env(env_name); }, seed);

    write_learning_curve_csv(paths.learning_curve, artifacts.learning_curve);
    if (algorithm_uses_beta(config.algorithm))
        write_beta_trace_csv(paths.beta_trace, artifacts.beta_trace);
    write_bias_csv(paths.bias, artifacts.bias);
    write_terminal_errors_csv(paths.terminal_errors, artifacts.terminal_errors);
    save_checkpoint(paths.checkpoint, *artifacts.final_state);
    return artifacts;
}

void write_manifest(const fs::path& out_root, const AgentConfig& config,
                    const std::string& env_name, const std::vector<std::uint64_t>& seeds) {
    nlohmann::json manifest;
    manifest["artifact_format_version"] = kArtifactFormatVersion;
    const auto now = std::chrono::system_clock::now();
    manifest["created_unix_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
    manifest["env"] = env_name;
    manifest["algorithm"] = to_string(config.algorithm);
    manifest["out_dir"] = out_root.string();
    manifest["seeds"] = seeds;

    nlohmann::json cfg;
    for (const auto& [k, v] : config_to_map(config)) cfg[k] = v;
    manifest["config"] = cfg;

    nlohmann::json runs = nlohmann::json::array();
    for (std::uint64_t seed : seeds) {
        const RunPaths p = run_paths(out_root, config.algorithm, env_name, seed);
        nlohmann::json run;
        run["seed"] = seed;
        run["dir"] = p.dir.filename().string();
        run["learning_curve"] = p.learning_curve.filename().string();
        if (algorithm_uses_beta(config.algorithm))
            run["beta_trace"] = p.beta_trace.filename().string();
        run["bias"] = p.bias.filename().string();
        run["terminal_errors"] = p.terminal_errors.filename().string();
        run["checkpoint"] = p.checkpoint.filename().string();
        runs.push_back(run);
    }
    manifest["runs"] = runs;

    auto out = open_artifact(out_root / "manifest.json");
    out << manifest.dump(2) << "\n";
}

} // namespace awd3
