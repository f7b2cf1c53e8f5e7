#include "awd3/envs.hpp"

#include <algorithm>
#include <cmath>

#include "awd3/errors.hpp"

namespace awd3 {

void Environment::set_state(std::span<const double>) {
    throw CapabilityError("environment does not support state injection");
}

namespace {

constexpr double kPi = 3.141592653589793;

double clip(double x, double lo, double hi) {
    return std::min(hi, std::max(lo, x));
}

double wrap_angle(double theta) {
    // Wrap to [-pi, pi).
    double w = std::fmod(theta + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

void check_action(const EnvSpec& spec, std::span<const double> action) {
    if (static_cast<int>(action.size()) != spec.action_dim)
        throw ShapeError("step: action dimension does not match env spec");
}

} // namespace

// ---------------------------------------------------------------------------
// PendulumSwingUp

namespace {
constexpr double kPendulumG = 10.0;
constexpr double kPendulumMass = 1.0;
constexpr double kPendulumLength = 1.0;
constexpr double kPendulumDt = 0.05;
constexpr double kPendulumMaxSpeed = 8.0;
constexpr double kPendulumMaxTorque = 2.0;
} // namespace

PendulumSwingUp::PendulumSwingUp() {
    spec_.name = "pendulum";
    spec_.state_dim = 3;
    spec_.action_dim = 1;
    spec_.action_bound = kPendulumMaxTorque;
    spec_.time_limit = 200;
    spec_.discount = 0.99;
    // max |r| = pi^2 + 0.1*8^2 + 0.001*2^2
    spec_.reward_bound = kPi * kPi + 0.1 * 64.0 + 0.001 * 4.0;
}

std::vector<double> PendulumSwingUp::observation() const {
    return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

std::vector<double> PendulumSwingUp::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    theta_ = rng_.uniform(-kPi, kPi);
    theta_dot_ = rng_.uniform(-1.0, 1.0);
    steps_ = 0;
    return observation();
}

void PendulumSwingUp::set_state(std::span<const double> state) {
    if (state.size() != 3) throw ShapeError("pendulum set_state: expected 3 components");
    theta_ = std::atan2(state[1], state[0]);
    theta_dot_ = clip(state[2], -kPendulumMaxSpeed, kPendulumMaxSpeed);
    steps_ = 0;
}

StepResult PendulumSwingUp::step(std::span<const double> action) {
    check_action(spec_, action);
    const double torque = clip(action[0], -kPendulumMaxTorque, kPendulumMaxTorque);
    const double angle = wrap_angle(theta_);
    const double cost = angle * angle + 0.1 * theta_dot_ * theta_dot_ + 0.001 * torque * torque;

    const double accel =
        3.0 * kPendulumG / (2.0 * kPendulumLength) * std::sin(theta_) +
        3.0 / (kPendulumMass * kPendulumLength * kPendulumLength) * torque;
    theta_dot_ = clip(theta_dot_ + accel * kPendulumDt, -kPendulumMaxSpeed, kPendulumMaxSpeed);
    theta_ += theta_dot_ * kPendulumDt;
    steps_ += 1;

    StepResult out;
    out.next_state = observation();
    out.reward = -cost;
    out.termination = steps_ >= spec_.time_limit ? Termination::time_limit : Termination::none;
    return out;
}

// ---------------------------------------------------------------------------
// PointGoal2D

PointGoal2D::PointGoal2D() {
    spec_.name = "pointgoal2d";
    spec_.state_dim = 2;
    spec_.action_dim = 2;
    spec_.action_bound = 0.1;
    spec_.time_limit = 100;
    spec_.discount = 0.99;
    spec_.reward_bound = kGoalBonus; // per-step |r| <= 2*sqrt(2) < 10 off-goal
}

std::vector<double> PointGoal2D::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    px_ = clip(kStartX + rng_.uniform(-kStartJitter, kStartJitter), -1.0, 1.0);
    py_ = clip(kStartY + rng_.uniform(-kStartJitter, kStartJitter), -1.0, 1.0);
    steps_ = 0;
    done_ = false;
    return {px_, py_};
}

void PointGoal2D::set_state(std::span<const double> state) {
    if (state.size() != 2) throw ShapeError("pointgoal2d set_state: expected 2 components");
    px_ = clip(state[0], -1.0, 1.0);
    py_ = clip(state[1], -1.0, 1.0);
    steps_ = 0;
    done_ = false;
}

StepResult PointGoal2D::step(std::span<const double> action) {
    check_action(spec_, action);
    if (done_)
        throw std::logic_error("pointgoal2d: step after true terminal without reset");

    const double ax = clip(action[0], -spec_.action_bound, spec_.action_bound);
    const double ay = clip(action[1], -spec_.action_bound, spec_.action_bound);
    px_ = clip(px_ + ax, -1.0, 1.0);
    py_ = clip(py_ + ay, -1.0, 1.0);
    steps_ += 1;

    const double dx = px_ - kGoalX;
    const double dy = py_ - kGoalY;
    const double dist = std::sqrt(dx * dx + dy * dy);

    StepResult out;
    out.next_state = {px_, py_};
    out.reward = -dist;
    if (dist < kGoalRadius) {
        out.reward += kGoalBonus;
        out.termination = Termination::true_terminal;
        done_ = true;
    } else if (steps_ >= spec_.time_limit) {
        out.termination = Termination::time_limit;
    }
    return out;
}

// ---------------------------------------------------------------------------
// QuadraticBandit

QuadraticBandit::QuadraticBandit(double target_action) : target_action_(target_action) {
    if (!(target_action > -1.0 && target_action < 1.0))
        throw ParameterDomainError("QuadraticBandit: target action must lie in (-1, 1)");
    spec_.name = "quadbandit";
    spec_.state_dim = 1;
    spec_.action_dim = 1;
    spec_.action_bound = 1.0;
    spec_.time_limit = 1;
    spec_.discount = 0.99;
    spec_.reward_bound = 4.0; // (|a| + |a*|)^2 <= 4
}

double QuadraticBandit::true_q(double action) const {
    const double d = clip(action, -1.0, 1.0) - target_action_;
    return -d * d;
}

std::vector<double> QuadraticBandit::reset(std::uint64_t) {
    done_ = false;
    return {0.0};
}

void QuadraticBandit::set_state(std::span<const double> state) {
    if (state.size() != 1) throw ShapeError("quadbandit set_state: expected 1 component");
    done_ = false;
}

StepResult QuadraticBandit::step(std::span<const double> action) {
    check_action(spec_, action);
    if (done_)
        throw std::logic_error("quadbandit: step after true terminal without reset");
    done_ = true;
    StepResult out;
    out.next_state = {0.0};
    out.reward = true_q(action[0]);
    out.termination = Termination::true_terminal;
    return out;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Environment> make_env(const std::string& name) {
    if (name == "pendulum") return std::make_unique<PendulumSwingUp>();
    if (name == "pointgoal2d") return std::make_unique<PointGoal2D>();
    if (name == "quadbandit") return std::make_unique<QuadraticBandit>();
    throw ConfigError("unknown environment: " + name);
}

bool is_known_env(const std::string& name) {
    return name == "pendulum" || name == "pointgoal2d" || name == "quadbandit";
}

int mc_horizon_cap(double gamma, double reward_bound, double tol) {
    if (gamma <= 0.0) return 1;
    if (gamma >= 1.0) throw ParameterDomainError("mc_horizon_cap: gamma must be < 1");
    if (reward_bound <= tol) return 1;
    return static_cast<int>(std::ceil(std::log(tol / reward_bound) / std::log(gamma)));
}

double mc_true_q(Environment& env, const Mlp& actor,
                 std::span<const double> start_state,
                 std::span<const double> start_action,
                 double gamma, int horizon_cap, std::uint64_t seed) {
    if (!env.supports_state_injection())
        throw CapabilityError("mc_true_q: environment does not support state injection");

    env.reset(seed);
    env.set_state(start_state);

    StepResult r = env.step(start_action);
    double ret = r.reward;
    double discount = gamma;
    for (int t = 1; t < horizon_cap; ++t) {
        if (r.termination == Termination::true_terminal) break;
        if (discount == 0.0) break;
        const std::vector<double> action = actor.forward(r.next_state);
        r = env.step(action);
        ret += discount * r.reward;
        discount *= gamma;
    }
    return ret;
}

} // namespace awd3
