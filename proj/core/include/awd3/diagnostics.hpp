#pragma once

#include <functional>
#include <span>

#include "awd3/agents.hpp"
#include "awd3/env.hpp"
#include "awd3/replay.hpp"

namespace awd3 {

/// A state-action value source; adapters exist for an agent's critics and for
/// closed-form values in tests.
using QFunction =
    std::function<double(std::span<const double> state, std::span<const double> action)>;

/// Estimated-vs-true value measurement over (s, a) pairs sampled uniformly
/// from the replay buffer. `estimate` is the combined value under whatever
/// rule the caller chose; the true value is the Monte-Carlo return of the
/// given policy from the stored pair. Read-only with respect to everything
/// except the dedicated environment instance.
BiasRecord measure_bias(const QFunction& estimate, const Mlp& policy,
                        const ReplayBuffer& buffer, Environment& env, int n_pairs,
                        double gamma, std::uint64_t seed);

/// Agent convenience form: estimates with the ONLINE critics combined under
/// the agent's own rule (min for td3, weighted for wd3/awd3 at the current
/// beta, triplet for tcd3) and rolls out the agent's noise-free actor.
BiasRecord measure_bias(const AgentState& agent, const ReplayBuffer& buffer,
                        Environment& env, int n_pairs, double gamma,
                        std::uint64_t seed);

/// Combined online-critic estimate under the agent's rule, as a QFunction.
QFunction agent_q_estimate(const AgentState& agent);

/// Snapshot of the current weighting parameter.
BetaRecord record_beta(const AgentState& agent, long long step);

} // namespace awd3
