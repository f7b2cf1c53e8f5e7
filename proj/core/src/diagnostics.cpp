#include "awd3/diagnostics.hpp"

#include <vector>

#include "awd3/envs.hpp"
#include "awd3/errors.hpp"

namespace awd3 {

QFunction agent_q_estimate(const AgentState& agent) {
    return [&agent](std::span<const double> state, std::span<const double> action) {
        std::vector<double> x;
        x.reserve(state.size() + action.size());
        x.insert(x.end(), state.begin(), state.end());
        x.insert(x.end(), action.begin(), action.end());
        std::vector<double> qs(agent.critics.size());
        for (std::size_t i = 0; i < agent.critics.size(); ++i)
            qs[i] = agent.critics[i].forward(x)[0];
        return combine_q(agent.config.algorithm, qs, agent.beta);
    };
}

BiasRecord measure_bias(const QFunction& estimate, const Mlp& policy,
                        const ReplayBuffer& buffer, Environment& env, int n_pairs,
                        double gamma, std::uint64_t seed) {
    if (buffer.empty()) throw ShapeError("measure_bias: replay buffer is empty");
    if (!env.supports_state_injection())
        throw CapabilityError("measure_bias: environment does not support state injection");

    const int cap = mc_horizon_cap(gamma, env.spec().reward_bound);
    Rng rng(seed);
    double est_sum = 0.0;
    double true_sum = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
        const Transition& tr = buffer.at(rng.uniform_index(buffer.size()));
        est_sum += estimate(tr.state, tr.action);
        true_sum += mc_true_q(env, policy, tr.state, tr.action, gamma, cap,
                              rng.next_u64());
    }
    BiasRecord rec;
    rec.n_pairs = n_pairs;
    rec.estimated_q_mean = est_sum / n_pairs;
    rec.true_q_mean = true_sum / n_pairs;
    rec.bias = rec.estimated_q_mean - rec.true_q_mean;
    return rec;
}

BiasRecord measure_bias(const AgentState& agent, const ReplayBuffer& buffer,
                        Environment& env, int n_pairs, double gamma,
                        std::uint64_t seed) {
    return measure_bias(agent_q_estimate(agent), agent.actor, buffer, env, n_pairs,
                        gamma, seed);
}

BetaRecord record_beta(const AgentState& agent, long long step) {
    return BetaRecord{step, agent.beta};
}

} // namespace awd3
