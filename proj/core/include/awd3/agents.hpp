#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "awd3/env.hpp"
#include "awd3/mlp.hpp"
#include "awd3/replay.hpp"
#include "awd3/rng.hpp"

namespace awd3 {

enum class Algorithm { ddpg, td3, wd3, awd3, tcd3 };
enum class BetaUpdateMode { last_terminal, batch };

std::string to_string(Algorithm a);
std::string to_string(BetaUpdateMode m);
Algorithm algorithm_from_string(const std::string& s); // ConfigError on bad name
BetaUpdateMode beta_update_mode_from_string(const std::string& s);

/// Does the algorithm's target rule use the weighting parameter at all?
bool algorithm_uses_beta(Algorithm a);

/// Hyper-parameters of one training run. Noise deviations are fractions of
/// the action bound. Fields set to -1 are resolved from total_steps by
/// resolve_defaults(): warmup = total/10, exploration = total/40,
/// beta trace cadence = total/1000, bias cadence = total/20.
struct AgentConfig {
    Algorithm algorithm = Algorithm::awd3;
    double gamma = 0.99;
    double tau = 5e-3;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    int batch_size = 100;
    int policy_delay = 2;
    double exploration_noise_std = 0.1;
    double target_noise_std = 0.2;
    double target_noise_clip = 0.5;
    double beta_init = 0.5;
    double beta_lr = 1e-4;
    double beta_min = 0.0;
    double beta_max = 2.5;
    long long beta_warmup_steps = -1;
    BetaUpdateMode beta_update_mode = BetaUpdateMode::last_terminal;
    int beta_batch_size = 16;
    std::size_t beta_buffer_capacity = 10000;
    long long exploration_phase_steps = -1;
    long long total_steps = 20000;
    long long eval_interval = 1000; // 0 disables periodic evaluation
    int eval_episodes = 10;
    int hidden1 = 64;
    int hidden2 = 64;
    std::size_t replay_capacity = 1000000;
    long long bias_interval = -1; // 0 disables bias measurement
    int bias_pairs = 100;
    long long beta_trace_interval = -1;

    void resolve_defaults();
    /// Throws ConfigError on out-of-range values or inconsistent settings
    /// (e.g. batch beta updates for an algorithm without a beta mechanism).
    void validate() const;
};

/// Everything that evolves during a run: the six (or eight) networks, their
/// optimizer moments, the weighting parameter and the named random streams.
struct AgentState {
    AgentConfig config;
    std::string env_name;
    Mlp actor;
    Mlp actor_target;
    std::vector<Mlp> critics;        // 2, or 3 for the triplet rule, 1 for ddpg
    std::vector<Mlp> critic_targets;
    AdamState actor_opt;
    std::vector<AdamState> critic_opts;
    double beta = 0.5;
    long long t = 0;
    Rng exploration_rng;
    Rng target_noise_rng;
    Rng sampling_rng;
    Rng env_reset_rng;
    Rng eval_rng;
    Rng diagnostics_rng;
};

/// Fresh networks and streams for (config, env, seed). Xavier init; targets
/// start as exact copies of their online networks.
AgentState make_agent(const AgentConfig& config, const EnvSpec& env_spec,
                      std::uint64_t seed);

int critic_count(Algorithm a);

// ---------------------------------------------------------------------------
// Target labels. true_terminal drops the bootstrap term (label is exactly r);
// time_limit cutoffs bootstrap like ordinary transitions.

double target_label_ddpg(double r, double gamma, double q,
                         Termination term = Termination::none);
double target_label_td3(double r, double gamma, double q1, double q2,
                        Termination term = Termination::none);
double target_label_wd3(double r, double gamma, double q1, double q2, double beta,
                        Termination term = Termination::none);
double target_label_tcd3(double r, double gamma, double q1, double q2, double q3,
                         Termination term = Termination::none);

/// beta*min(q1,q2) + (1-beta)/2*(q1+q2); the weighted pair combination shared
/// by the wd3 label, the beta update and the diagnostics.
double weighted_min_avg(double q1, double q2, double beta);

/// Estimated Q under the algorithm's own combination rule.
double combine_q(Algorithm a, std::span<const double> qs, double beta);

// ---------------------------------------------------------------------------
// Update steps

/// Target policy with clipped smoothing noise, clipped to action bounds.
std::vector<double> smoothed_target_action(const Mlp& actor_target,
                                           std::span<const double> next_state,
                                           double noise_std, double noise_clip,
                                           double action_bound, Rng& rng);

/// The shared critic label for each transition of the batch, computed from
/// the target networks under the configured rule. One label per transition;
/// both (all) critics regress to the same values.
std::vector<double> compute_labels(AgentState& state,
                                   std::span<const Transition* const> batch);

/// One Adam step per critic on the mean squared error to the shared labels.
/// Returns the pre-step loss averaged over critics.
double critic_update(AgentState& state, std::span<const Transition* const> batch);

/// Gradient of the mean critic-1 value over states with respect to the actor
/// parameters (the deterministic policy gradient).
std::vector<double> actor_objective_gradient(const Mlp& critic1, const Mlp& actor,
                                             std::span<const Transition* const> batch);

/// One Adam ascent step on the mean of critic 1 evaluated at the actor's
/// actions. Critic 1 only, for every algorithm.
void actor_update(AgentState& state, std::span<const Transition* const> batch);

/// Weighted target-critic estimate of the terminal pair, ytilde.
double terminal_estimate(const AgentState& state, const Transition& terminal);

/// beta <- clamp(beta - lr*(r - ytilde), [beta_min, beta_max]) from one
/// true-terminal transition. Throws ConfigError if the transition is not a
/// true terminal (time-limit endings must be filtered by the caller).
double beta_update(AgentState& state, const Transition& terminal);

/// Batch form: beta <- clamp(beta - lr * mean(r - ytilde)).
double beta_update_batch(AgentState& state, std::span<const Transition* const> terminals);

// ---------------------------------------------------------------------------
// Training

struct EvalRecord {
    long long step = 0;
    double mean_return = 0.0;
    double std_return = 0.0;
};

struct BetaRecord {
    long long step = 0;
    double beta = 0.0;
};

struct BiasRecord {
    long long step = 0;
    double estimated_q_mean = 0.0;
    double true_q_mean = 0.0;
    double bias = 0.0; // estimated - true, exactly
    int n_pairs = 0;
};

struct TerminalErrorRecord {
    long long step = 0;
    double reward = 0.0;
    double estimate = 0.0;
};

struct RunArtifacts {
    std::vector<EvalRecord> learning_curve;
    std::vector<BetaRecord> beta_trace;
    std::vector<BiasRecord> bias;
    std::vector<TerminalErrorRecord> terminal_errors;
    std::unique_ptr<AgentState> final_state;
};

/// Per-step observer for instrumented runs. `labels` point into loop-local
/// storage and are only valid during the call; agent is read-only.
struct StepInfo {
    long long t = 0;
    const AgentState* agent = nullptr;
    bool learning = false;
    bool actor_updated = false;
    Termination termination = Termination::none;
    std::span<const double> batch_labels;
    std::span<const double> batch_rewards;
    std::span<const Termination> batch_terminations;
};
using StepHook = std::function<void(const StepInfo&)>;

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

/// Full training run: uniform-random exploration phase without updates, then
/// per step one critic update, actor+target updates every policy_delay steps,
/// and the beta update at true-terminal episode ends past warmup (awd3 only).
/// Periodic noise-free evaluations run on a separate environment instance and
/// are never stored in the replay buffer. Deterministic per (config, seed).
RunArtifacts train(const AgentConfig& config, const EnvFactory& make_environment,
                   std::uint64_t seed, const StepHook& hook = {});

/// Mean and sample deviation of the undiscounted return of the noise-free
/// policy over n episodes.
EvalRecord evaluate_policy(const Mlp& actor, Environment& env, int n_episodes,
                           Rng& reset_rng);

/// Same, for the uniform random policy (the exploration-phase behavior).
EvalRecord evaluate_random_policy(Environment& env, int n_episodes, Rng& rng);

} // namespace awd3
