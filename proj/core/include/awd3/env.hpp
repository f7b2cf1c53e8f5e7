#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "awd3/replay.hpp"

namespace awd3 {

struct EnvSpec {
    std::string name;
    int state_dim = 0;
    int action_dim = 0;
    double action_bound = 1.0;
    int time_limit = 1;
    double discount = 0.99;
    double reward_bound = 1.0; // |r| never exceeds this
};

struct StepResult {
    std::vector<double> next_state;
    double reward = 0.0;
    Termination termination = Termination::none;
};

/// Behavioral contract for the bundled desk-scale environments.
///
/// Dynamics are deterministic given the reset seed and the action sequence;
/// any environment noise is drawn from the stream seeded at reset. Stepping
/// after a true terminal without reset is an error. The time limit is a
/// truncation marker only: step() keeps working past it (Monte-Carlo rollouts
/// deliberately run through time limits), the training loop resets instead.
class Environment {
  public:
    virtual ~Environment() = default;

    virtual const EnvSpec& spec() const = 0;
    virtual std::vector<double> reset(std::uint64_t seed) = 0;
    virtual StepResult step(std::span<const double> action) = 0;

    /// State injection for the Monte-Carlo true-Q estimator: re-enter an
    /// arbitrary stored state. Also clears episode step count and terminal
    /// status. Default implementation reports the capability as missing.
    virtual bool supports_state_injection() const { return false; }
    virtual void set_state(std::span<const double> state);
};

/// "pendulum", "pointgoal2d" or "quadbandit"; throws ConfigError on other names.
std::unique_ptr<Environment> make_env(const std::string& name);
bool is_known_env(const std::string& name);

} // namespace awd3
