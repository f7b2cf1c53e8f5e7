#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "awd3/agents.hpp"

namespace awd3 {

/// Shortest round-trip decimal representation (locale independent); every
/// number in a CSV artifact goes through this so reruns are byte-identical.
std::string csv_double(double v);

void write_learning_curve_csv(const std::filesystem::path& path,
                              const std::vector<EvalRecord>& records);
void write_beta_trace_csv(const std::filesystem::path& path,
                          const std::vector<BetaRecord>& records);
void write_bias_csv(const std::filesystem::path& path,
                    const std::vector<BiasRecord>& records);
void write_terminal_errors_csv(const std::filesystem::path& path,
                               const std::vector<TerminalErrorRecord>& records);

/// Artifact locations of one (algo, env, seed) run: a directory named
/// {algo}_{env}_{seed} under the output root, so parallel seeds never collide.
struct RunPaths {
    std::filesystem::path dir;
    std::filesystem::path learning_curve;
    std::filesystem::path beta_trace;
    std::filesystem::path bias;
    std::filesystem::path terminal_errors;
    std::filesystem::path checkpoint;
};

RunPaths run_paths(const std::filesystem::path& out_root, Algorithm algo,
                   const std::string& env_name, std::uint64_t seed);

/// Trains one seed and writes every artifact. The beta trace file is written
/// only for algorithms whose target rule uses beta. Returns the artifacts for
/// in-process consumers (aggregate reports, tests).
RunArtifacts execute_run(const AgentConfig& config, const std::string& env_name,
                         std::uint64_t seed, const RunPaths& paths);

inline constexpr int kArtifactFormatVersion = 1;

/// manifest.json at the output root: config snapshot, seed list, per-run
/// artifact paths and wall-clock metadata. Written before training begins.
void write_manifest(const std::filesystem::path& out_root, const AgentConfig& config,
                    const std::string& env_name, const std::vector<std::uint64_t>& seeds);

} // namespace awd3
