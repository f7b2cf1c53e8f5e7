#pragma once

#include "awd3/env.hpp"
#include "awd3/mlp.hpp"
#include "awd3/rng.hpp"

namespace awd3 {

/// Torque-limited swing-up of a single pendulum. State (cos th, sin th, thdot),
/// torque in [-2, 2], reward -(wrapped_angle^2 + 0.1*thdot^2 + 0.001*a^2).
/// Episodes end by time limit only, never by a true terminal, which makes this
/// the canonical check that beta stays frozen on time-limit-only tasks.
class PendulumSwingUp final : public Environment {
  public:
    PendulumSwingUp();
    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(std::span<const double> action) override;
    bool supports_state_injection() const override { return true; }
    void set_state(std::span<const double> state) override;

  private:
    std::vector<double> observation() const;
    EnvSpec spec_;
    Rng rng_;
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    int steps_ = 0;
};

/// Point mass on [-1,1]^2 steered by bounded velocity increments toward a
/// fixed goal. Dense negative-distance reward, +10 bonus with a true terminal
/// inside the goal radius. The start corner sits far from the goal so random
/// walks essentially never finish an episode by luck.
class PointGoal2D final : public Environment {
  public:
    PointGoal2D();
    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(std::span<const double> action) override;
    bool supports_state_injection() const override { return true; }
    void set_state(std::span<const double> state) override;

    static constexpr double kGoalX = 0.6;
    static constexpr double kGoalY = 0.6;
    static constexpr double kGoalRadius = 0.05;
    static constexpr double kStartX = -0.9;
    static constexpr double kStartY = -0.9;
    static constexpr double kStartJitter = 0.05;
    static constexpr double kGoalBonus = 10.0;

  private:
    EnvSpec spec_;
    Rng rng_;
    double px_ = 0.0, py_ = 0.0;
    int steps_ = 0;
    bool done_ = false;
};

/// One-step episodes with a fixed state and reward -(a - a*)^2; every step is
/// a true terminal and the optimal value function is available in closed form.
class QuadraticBandit final : public Environment {
  public:
    explicit QuadraticBandit(double target_action = 0.4);
    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(std::uint64_t seed) override;
    StepResult step(std::span<const double> action) override;
    bool supports_state_injection() const override { return true; }
    void set_state(std::span<const double> state) override;

    double target_action() const { return target_action_; }
    double true_q(double action) const;

  private:
    EnvSpec spec_;
    double target_action_;
    bool done_ = false;
};

/// Rollout horizon after which the discounted tail is below tol:
/// smallest cap with gamma^cap * reward_bound < tol.
int mc_horizon_cap(double gamma, double reward_bound, double tol = 1e-4);

/// Discounted return of taking start_action in start_state and then following
/// the actor (noise-free) until a true terminal or the horizon cap. The
/// environment is reseeded and re-entered via state injection; throws
/// CapabilityError when the environment lacks it.
double mc_true_q(Environment& env, const Mlp& actor,
                 std::span<const double> start_state,
                 std::span<const double> start_action,
                 double gamma, int horizon_cap, std::uint64_t seed);

} // namespace awd3
