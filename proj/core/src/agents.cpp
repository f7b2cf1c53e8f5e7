#include "awd3/agents.hpp"

#include <algorithm>
#include <cmath>

#include "awd3/diagnostics.hpp"
#include "awd3/errors.hpp"

namespace awd3 {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::ddpg: return "ddpg";
        case Algorithm::td3: return "td3";
        case Algorithm::wd3: return "wd3";
        case Algorithm::awd3: return "awd3";
        case Algorithm::tcd3: return "tcd3";
    }
    return "?";
}

std::string to_string(BetaUpdateMode m) {
    return m == BetaUpdateMode::last_terminal ? "last_terminal" : "batch";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "ddpg") return Algorithm::ddpg;
    if (s == "td3") return Algorithm::td3;
    if (s == "wd3") return Algorithm::wd3;
    if (s == "awd3") return Algorithm::awd3;
    if (s == "tcd3") return Algorithm::tcd3;
    throw ConfigError("unknown algorithm: " + s);
}

BetaUpdateMode beta_update_mode_from_string(const std::string& s) {
    if (s == "last_terminal") return BetaUpdateMode::last_terminal;
    if (s == "batch") return BetaUpdateMode::batch;
    throw ConfigError("unknown beta_update_mode: " + s);
}

bool algorithm_uses_beta(Algorithm a) {
    return a == Algorithm::wd3 || a == Algorithm::awd3;
}

int critic_count(Algorithm a) {
    switch (a) {
        case Algorithm::ddpg: return 1;
        case Algorithm::tcd3: return 3;
        default: return 2;
    }
}

void AgentConfig::resolve_defaults() {
    if (beta_warmup_steps < 0) beta_warmup_steps = total_steps / 10;
    if (exploration_phase_steps < 0) exploration_phase_steps = total_steps / 40;
    if (beta_trace_interval < 0) beta_trace_interval = std::max<long long>(1, total_steps / 1000);
    if (bias_interval < 0) bias_interval = std::max<long long>(1, total_steps / 20);
}

void AgentConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
    if (policy_delay < 1) throw ConfigError("policy_delay must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("learning rates must be > 0");
    if (!(beta_lr >= 0.0)) throw ConfigError("beta_lr must be >= 0");
    if (!(beta_min >= 0.0) || !(beta_min < beta_max))
        throw ConfigError("beta range must satisfy 0 <= beta_min < beta_max");
    if (!(beta_init >= beta_min && beta_init <= beta_max))
        throw ConfigError("beta_init must lie in [beta_min, beta_max]");
    if (beta_warmup_steps < 0 || exploration_phase_steps < 0)
        throw ConfigError("config not resolved: call resolve_defaults() first");
    if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
    if (eval_interval < 0) throw ConfigError("eval_interval must be >= 0");
    if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
    if (hidden1 < 1 || hidden2 < 1) throw ConfigError("hidden sizes must be >= 1");
    if (replay_capacity < 1) throw ConfigError("replay_capacity must be >= 1");
    if (beta_batch_size < 1) throw ConfigError("beta_batch_size must be >= 1");
    if (bias_pairs < 0) throw ConfigError("bias_pairs must be >= 0");
    if (beta_update_mode == BetaUpdateMode::batch && algorithm != Algorithm::awd3)
        throw ConfigError("beta updates requested for an algorithm without a beta mechanism");
    if (!(exploration_noise_std >= 0.0) || !(target_noise_std >= 0.0) ||
        !(target_noise_clip >= 0.0))
        throw ConfigError("noise parameters must be >= 0");
}

namespace {
enum StreamId : std::uint64_t {
    kStreamActorInit = 0,
    kStreamCritic1Init = 1,
    kStreamCritic2Init = 2,
    kStreamCritic3Init = 3,
    kStreamExploration = 4,
    kStreamTargetNoise = 5,
    kStreamSampling = 6,
    kStreamEnvReset = 7,
    kStreamEval = 8,
    kStreamDiagnostics = 9,
};
} // namespace

AgentState make_agent(const AgentConfig& config, const EnvSpec& env_spec,
                      std::uint64_t seed) {
    AgentState s;
    s.config = config;
    s.env_name = env_spec.name;

    const std::vector<int> actor_dims = {env_spec.state_dim, config.hidden1,
                                         config.hidden2, env_spec.action_dim};
    const std::vector<int> critic_dims = {env_spec.state_dim + env_spec.action_dim,
                                          config.hidden1, config.hidden2, 1};

    Rng actor_rng = Rng::stream(seed, kStreamActorInit);
    s.actor = init_xavier(actor_dims, OutputActivation::scaled_tanh,
                          env_spec.action_bound, actor_rng);
    s.actor_target = s.actor;
    s.actor_opt = AdamState(s.actor.param_count(), config.actor_lr);

    const int n_critics = critic_count(config.algorithm);
    for (int i = 0; i < n_critics; ++i) {
        Rng critic_rng = Rng::stream(seed, kStreamCritic1Init + i);
        Mlp critic = init_xavier(critic_dims, OutputActivation::identity, 1.0, critic_rng);
        s.critic_opts.emplace_back(critic.param_count(), config.critic_lr);
        s.critic_targets.push_back(critic);
        s.critics.push_back(std::move(critic));
    }

    s.beta = config.beta_init;
    s.exploration_rng = Rng::stream(seed, kStreamExploration);
    s.target_noise_rng = Rng::stream(seed, kStreamTargetNoise);
    s.sampling_rng = Rng::stream(seed, kStreamSampling);
    s.env_reset_rng = Rng::stream(seed, kStreamEnvReset);
    s.eval_rng = Rng::stream(seed, kStreamEval);
    s.diagnostics_rng = Rng::stream(seed, kStreamDiagnostics);
    return s;
}

// ---------------------------------------------------------------------------
// Labels

namespace {
double bootstrap(double r, double gamma, double q, Termination term) {
    return term == Termination::true_terminal ? r : r + gamma * q;
}
} // namespace

double target_label_ddpg(double r, double gamma, double q, Termination term) {
    return bootstrap(r, gamma, q, term);
}

double target_label_td3(double r, double gamma, double q1, double q2, Termination term) {
    return bootstrap(r, gamma, std::min(q1, q2), term);
}

double weighted_min_avg(double q1, double q2, double beta) {
    return beta * std::min(q1, q2) + 0.5 * (1.0 - beta) * (q1 + q2);
}

double target_label_wd3(double r, double gamma, double q1, double q2, double beta,
                        Termination term) {
    return bootstrap(r, gamma, weighted_min_avg(q1, q2, beta), term);
}

double target_label_tcd3(double r, double gamma, double q1, double q2, double q3,
                         Termination term) {
    return bootstrap(r, gamma, std::min(std::max(q1, q2), q3), term);
}

double combine_q(Algorithm a, std::span<const double> qs, double beta) {
    switch (a) {
        case Algorithm::ddpg:
            return qs[0];
        case Algorithm::td3:
            return std::min(qs[0], qs[1]);
        case Algorithm::wd3:
        case Algorithm::awd3:
            return weighted_min_avg(qs[0], qs[1], beta);
        case Algorithm::tcd3:
            return std::min(std::max(qs[0], qs[1]), qs[2]);
    }
    return qs[0];
}

// ---------------------------------------------------------------------------
// Updates

std::vector<double> smoothed_target_action(const Mlp& actor_target,
                                           std::span<const double> next_state,
                                           double noise_std, double noise_clip,
                                           double action_bound, Rng& rng) {
    std::vector<double> action = actor_target.forward(next_state);
    for (double& a : action) {
        double eps = 0.0;
        if (noise_std > 0.0)
            eps = std::clamp(rng.normal(0.0, noise_std), -noise_clip, noise_clip);
        a = std::clamp(a + eps, -action_bound, action_bound);
    }
    return action;
}

namespace {

std::vector<double> concat_state_action(std::span<const double> s,
                                        std::span<const double> a) {
    std::vector<double> x;
    x.reserve(s.size() + a.size());
    x.insert(x.end(), s.begin(), s.end());
    x.insert(x.end(), a.begin(), a.end());
    return x;
}

double critic_value(const Mlp& critic, std::span<const double> s,
                    std::span<const double> a) {
    return critic.forward(concat_state_action(s, a))[0];
}

} // namespace

std::vector<double> compute_labels(AgentState& state,
                                   std::span<const Transition* const> batch) {
    const AgentConfig& cfg = state.config;
    const double bound = state.actor.action_bound;
    const double noise_std = cfg.target_noise_std * bound;
    const double noise_clip = cfg.target_noise_clip * bound;

    std::vector<double> labels(batch.size());
    std::vector<double> qs(state.critic_targets.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const Transition& tr = *batch[k];
        if (tr.termination == Termination::true_terminal) {
            labels[k] = tr.reward;
            continue;
        }
        const std::vector<double> next_action = smoothed_target_action(
            state.actor_target, tr.next_state, noise_std, noise_clip, bound,
            state.target_noise_rng);
        for (std::size_t i = 0; i < state.critic_targets.size(); ++i)
            qs[i] = critic_value(state.critic_targets[i], tr.next_state, next_action);
        labels[k] = tr.reward + cfg.gamma * combine_q(cfg.algorithm, qs, state.beta);
    }
    return labels;
}

namespace {

double critic_update_with_labels(AgentState& state,
                                 std::span<const Transition* const> batch,
                                 std::span<const double> labels) {
    const double n = static_cast<double>(batch.size());
    double loss_sum = 0.0;
    std::vector<double> grad;
    for (std::size_t i = 0; i < state.critics.size(); ++i) {
        Mlp& critic = state.critics[i];
        grad.assign(critic.param_count(), 0.0);
        double loss = 0.0;
        for (std::size_t k = 0; k < batch.size(); ++k) {
            const Transition& tr = *batch[k];
            const std::vector<double> x = concat_state_action(tr.state, tr.action);
            const double q = critic.forward(x)[0];
            const double err = q - labels[k];
            loss += err * err;
            const double out_grad[1] = {2.0 * err / n};
            critic.backward(x, out_grad, grad);
        }
        loss /= n;
        loss_sum += loss;
        adam_step(critic.params, grad, state.critic_opts[i]);
    }
    return loss_sum / static_cast<double>(state.critics.size());
}

} // namespace

double critic_update(AgentState& state, std::span<const Transition* const> batch) {
    if (batch.empty()) throw ShapeError("critic_update: batch must be nonempty");
    const std::vector<double> labels = compute_labels(state, batch);
    return critic_update_with_labels(state, batch, labels);
}

std::vector<double> actor_objective_gradient(const Mlp& critic1, const Mlp& actor,
                                             std::span<const Transition* const> batch) {
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const int state_dim = actor.input_dim();
    std::vector<double> grad(actor.param_count(), 0.0);
    std::vector<double> critic_scratch(critic1.param_count(), 0.0); // discarded
    const double unit[1] = {1.0};
    for (const Transition* tr : batch) {
        const std::vector<double> action = actor.forward(tr->state);
        const std::vector<double> x = concat_state_action(tr->state, action);
        const std::vector<double> dq_dx = critic1.backward(x, unit, critic_scratch);
        const std::span<const double> dq_da(dq_dx.data() + state_dim,
                                            dq_dx.size() - state_dim);
        actor.backward(tr->state, dq_da, grad, inv_n);
    }
    return grad;
}

void actor_update(AgentState& state, std::span<const Transition* const> batch) {
    if (batch.empty()) throw ShapeError("actor_update: batch must be nonempty");
    std::vector<double> ascent =
        actor_objective_gradient(state.critics[0], state.actor, batch);
    for (double& g : ascent) g = -g; // Adam minimizes; we maximize mean Q
    adam_step(state.actor.params, ascent, state.actor_opt);
}

// ---------------------------------------------------------------------------
// Beta

double terminal_estimate(const AgentState& state, const Transition& terminal) {
    std::vector<double> qs(state.critic_targets.size());
    for (std::size_t i = 0; i < qs.size(); ++i)
        qs[i] = critic_value(state.critic_targets[i], terminal.state, terminal.action);
    return combine_q(state.config.algorithm, qs, state.beta);
}

namespace {
double weighted_target_estimate(const AgentState& state, const Transition& tr) {
    const double q1 = critic_value(state.critic_targets[0], tr.state, tr.action);
    const double q2 = critic_value(state.critic_targets[1], tr.state, tr.action);
    return weighted_min_avg(q1, q2, state.beta);
}
} // namespace

double beta_update(AgentState& state, const Transition& terminal) {
    if (terminal.termination != Termination::true_terminal)
        throw ConfigError("beta_update: transition is not a true terminal "
                          "(time-limit endings must be filtered by the caller)");
    const double y_tilde = weighted_target_estimate(state, terminal);
    const double next = state.beta - state.config.beta_lr * (terminal.reward - y_tilde);
    state.beta = std::clamp(next, state.config.beta_min, state.config.beta_max);
    return state.beta;
}

double beta_update_batch(AgentState& state,
                         std::span<const Transition* const> terminals) {
    if (terminals.empty()) throw ShapeError("beta_update_batch: batch must be nonempty");
    double err_sum = 0.0;
    for (const Transition* tr : terminals) {
        if (tr->termination != Termination::true_terminal)
            throw ConfigError("beta_update_batch: batch contains a non-terminal transition");
        err_sum += tr->reward - weighted_target_estimate(state, *tr);
    }
    const double mean_err = err_sum / static_cast<double>(terminals.size());
    state.beta = std::clamp(state.beta - state.config.beta_lr * mean_err,
                            state.config.beta_min, state.config.beta_max);
    return state.beta;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {
EvalRecord summarize_returns(const std::vector<double>& returns) {
    EvalRecord rec;
    const double n = static_cast<double>(returns.size());
    double sum = 0.0;
    for (double r : returns) sum += r;
    rec.mean_return = sum / n;
    if (returns.size() > 1) {
        double ss = 0.0;
        for (double r : returns) {
            const double d = r - rec.mean_return;
            ss += d * d;
        }
        rec.std_return = std::sqrt(ss / (n - 1.0));
    }
    return rec;
}

template <typename ActionFn>
double run_episode(Environment& env, std::uint64_t seed, ActionFn&& act) {
    std::vector<double> state = env.reset(seed);
    double ret = 0.0;
    for (;;) {
        const std::vector<double> action = act(state);
        StepResult r = env.step(action);
        ret += r.reward;
        if (r.termination != Termination::none) break;
        state = std::move(r.next_state);
    }
    return ret;
}
} // namespace

EvalRecord evaluate_policy(const Mlp& actor, Environment& env, int n_episodes,
                           Rng& reset_rng) {
    std::vector<double> returns(n_episodes);
    for (int e = 0; e < n_episodes; ++e)
        returns[e] = run_episode(env, reset_rng.next_u64(),
                                 [&](const std::vector<double>& s) { return actor.forward(s); });
    return summarize_returns(returns);
}

EvalRecord evaluate_random_policy(Environment& env, int n_episodes, Rng& rng) {
    const EnvSpec& spec = env.spec();
    std::vector<double> returns(n_episodes);
    for (int e = 0; e < n_episodes; ++e)
        returns[e] = run_episode(env, rng.next_u64(), [&](const std::vector<double>&) {
            std::vector<double> a(spec.action_dim);
            for (double& ai : a) ai = rng.uniform(-spec.action_bound, spec.action_bound);
            return a;
        });
    return summarize_returns(returns);
}

// ---------------------------------------------------------------------------
// Training loop

RunArtifacts train(const AgentConfig& config, const EnvFactory& make_environment,
                   std::uint64_t seed, const StepHook& hook) {
    AgentConfig cfg = config;
    cfg.resolve_defaults();
    cfg.validate();

    std::unique_ptr<Environment> env = make_environment();
    std::unique_ptr<Environment> eval_env = make_environment();
    std::unique_ptr<Environment> diag_env;
    const EnvSpec& spec = env->spec();

    AgentState agent = make_agent(cfg, spec, seed);
    ReplayBuffer buffer(cfg.replay_capacity, spec.state_dim, spec.action_dim);
    ReplayBuffer beta_terminals(cfg.beta_buffer_capacity, spec.state_dim, spec.action_dim);

    RunArtifacts artifacts;
    const bool trace_beta = algorithm_uses_beta(cfg.algorithm) && cfg.beta_trace_interval > 0;
    const bool measure_bias_enabled =
        cfg.bias_interval > 0 && cfg.bias_pairs > 0 && env->supports_state_injection();
    if (measure_bias_enabled) diag_env = make_environment();
    if (trace_beta) artifacts.beta_trace.push_back({0, agent.beta});

    const double bound = spec.action_bound;
    const double explore_std = cfg.exploration_noise_std * bound;

    std::vector<double> state = env->reset(agent.env_reset_rng.next_u64());
    std::vector<const Transition*> batch_ptrs;
    std::vector<double> batch_rewards;
    std::vector<Termination> batch_terms;

    for (long long t = 0; t < cfg.total_steps; ++t) {
        agent.t = t;
        const bool learning = t >= cfg.exploration_phase_steps;

        // Act.
        std::vector<double> action(spec.action_dim);
        if (!learning) {
            for (double& a : action) a = agent.exploration_rng.uniform(-bound, bound);
        } else {
            action = agent.actor.forward(state);
            for (double& a : action) {
                a += agent.exploration_rng.normal(0.0, explore_std);
                a = std::clamp(a, -bound, bound);
            }
        }

        StepResult step = env->step(action);
        Transition tr{state, action, step.reward, step.next_state, step.termination};
        buffer.push(tr);

        // Learn.
        bool actor_updated = false;
        std::vector<double> labels;
        batch_rewards.clear();
        batch_terms.clear();
        if (learning) {
            const std::vector<std::size_t> idx =
                buffer.sample_indices(cfg.batch_size, agent.sampling_rng);
            batch_ptrs.clear();
            for (std::size_t i : idx) {
                batch_ptrs.push_back(&buffer.at(i));
                batch_rewards.push_back(buffer.at(i).reward);
                batch_terms.push_back(buffer.at(i).termination);
            }
            labels = compute_labels(agent, batch_ptrs);
            critic_update_with_labels(agent, batch_ptrs, labels);
            if (t % cfg.policy_delay == 0) {
                actor_update(agent, batch_ptrs);
                soft_update(agent.actor_target, agent.actor, cfg.tau);
                for (std::size_t i = 0; i < agent.critics.size(); ++i)
                    soft_update(agent.critic_targets[i], agent.critics[i], cfg.tau);
                actor_updated = true;
            }
        }

        // Episode end bookkeeping: record the terminal estimate under the
        // current weighting, then adapt beta (awd3, past warmup, true
        // terminals only; time-limit cutoffs never reach the update).
        if (step.termination == Termination::true_terminal) {
            const double y_tilde = terminal_estimate(agent, tr);
            artifacts.terminal_errors.push_back({t, tr.reward, y_tilde});
            if (cfg.beta_update_mode == BetaUpdateMode::batch) beta_terminals.push(tr);
            if (cfg.algorithm == Algorithm::awd3 && learning && t >= cfg.beta_warmup_steps) {
                if (cfg.beta_update_mode == BetaUpdateMode::last_terminal) {
                    beta_update(agent, *buffer.last_terminal());
                } else {
                    const std::vector<std::size_t> idx = beta_terminals.sample_indices(
                        cfg.beta_batch_size, agent.sampling_rng);
                    std::vector<const Transition*> terminals;
                    for (std::size_t i : idx) terminals.push_back(&beta_terminals.at(i));
                    beta_update_batch(agent, terminals);
                }
            }
        }

        if (step.termination != Termination::none) {
            state = env->reset(agent.env_reset_rng.next_u64());
        } else {
            state = std::move(step.next_state);
        }

        const long long done = t + 1;
        if (trace_beta &&
            (done % cfg.beta_trace_interval == 0 || done == cfg.total_steps))
            artifacts.beta_trace.push_back({done, agent.beta});

        if (cfg.eval_interval > 0 &&
            (done % cfg.eval_interval == 0 || done == cfg.total_steps)) {
            EvalRecord rec = evaluate_policy(agent.actor, *eval_env, cfg.eval_episodes,
                                             agent.eval_rng);
            rec.step = done;
            artifacts.learning_curve.push_back(rec);
        }

        if (measure_bias_enabled && !buffer.empty() && done % cfg.bias_interval == 0) {
            BiasRecord rec = measure_bias(agent, buffer, *diag_env, cfg.bias_pairs,
                                          cfg.gamma, agent.diagnostics_rng.next_u64());
            rec.step = done;
            artifacts.bias.push_back(rec);
        }

        if (hook) {
            StepInfo info;
            info.t = t;
            info.agent = &agent;
            info.learning = learning;
            info.actor_updated = actor_updated;
            info.termination = step.termination;
            info.batch_labels = labels;
            info.batch_rewards = batch_rewards;
            info.batch_terminations = batch_terms;
            hook(info);
        }
    }

    artifacts.final_state = std::make_unique<AgentState>(std::move(agent));
    return artifacts;
}

} // namespace awd3
