#include <doctest.h>

#include <cmath>

#include "awd3/envs.hpp"
#include "awd3/errors.hpp"

using namespace awd3;

namespace {

std::vector<std::vector<double>> rollout_states(Environment& env, std::uint64_t seed,
                                                int n_steps, Rng& action_rng) {
    std::vector<std::vector<double>> states;
    states.push_back(env.reset(seed));
    for (int k = 0; k < n_steps; ++k) {
        std::vector<double> a(env.spec().action_dim);
        for (double& ai : a)
            ai = action_rng.uniform(-env.spec().action_bound, env.spec().action_bound);
        auto r = env.step(a);
        states.push_back(r.next_state);
        if (r.termination == Termination::true_terminal) env.reset(seed + 1);
    }
    return states;
}

} // namespace

TEST_CASE("environments are deterministic under identical seeds and actions") {
    for (const char* name : {"pendulum", "pointgoal2d", "quadbandit"}) {
        auto env1 = make_env(name);
        auto env2 = make_env(name);
        Rng a1(9), a2(9);
        CHECK(rollout_states(*env1, 4, 150, a1) == rollout_states(*env2, 4, 150, a2));
    }
}

TEST_CASE("unknown environment names are rejected") {
    CHECK_THROWS_AS(make_env("mountaincar"), ConfigError);
    CHECK(is_known_env("pendulum"));
    CHECK(!is_known_env("walker2d"));
}

TEST_CASE("pendulum never terminates and flags its time limit") {
    PendulumSwingUp env;
    env.reset(1);
    for (int episode = 0; episode < 3; ++episode) {
        for (int t = 1; t <= 200; ++t) {
            const auto r = env.step(std::vector<double>{1.5});
            CHECK(r.termination != Termination::true_terminal);
            if (t == 200) CHECK(r.termination == Termination::time_limit);
            else if (t < 200) CHECK(r.termination == Termination::none);
        }
        env.reset(episode + 2);
    }
}

TEST_CASE("pendulum observations stay on the unit circle with bounded speed") {
    PendulumSwingUp env;
    Rng rng(31);
    auto s = env.reset(7);
    for (int t = 0; t < 500; ++t) {
        CHECK(s[0] * s[0] + s[1] * s[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(s[2]) <= 8.0);
        s = env.step(std::vector<double>{rng.uniform(-2, 2)}).next_state;
    }
}

TEST_CASE("rewards stay within the declared bound") {
    Rng rng(32);
    for (const char* name : {"pendulum", "pointgoal2d", "quadbandit"}) {
        auto env = make_env(name);
        const double bound = env->spec().reward_bound;
        env->reset(11);
        for (int t = 0; t < 100000; ++t) {
            std::vector<double> a(env->spec().action_dim);
            for (double& ai : a)
                ai = rng.uniform(-env->spec().action_bound, env->spec().action_bound);
            const auto r = env->step(a);
            CHECK(std::abs(r.reward) <= bound);
            if (r.termination != Termination::none) env->reset(t);
        }
    }
}

TEST_CASE("pointgoal terminates exactly inside the goal radius") {
    PointGoal2D env;
    env.reset(3);

    // Inject a state one step away from the goal and drive straight in.
    env.set_state(std::vector<double>{PointGoal2D::kGoalX - 0.08, PointGoal2D::kGoalY});
    const auto r = env.step(std::vector<double>{0.08, 0.0});
    CHECK(r.termination == Termination::true_terminal);
    CHECK(r.reward == doctest::Approx(PointGoal2D::kGoalBonus).epsilon(1e-12));
    CHECK_THROWS_AS(env.step(std::vector<double>{0.0, 0.0}), std::logic_error);

    // Just outside the radius: no terminal.
    env.set_state(std::vector<double>{PointGoal2D::kGoalX - 0.2, PointGoal2D::kGoalY});
    const auto r2 = env.step(std::vector<double>{0.1, 0.0});
    CHECK(r2.termination == Termination::none);
    CHECK(r2.reward == doctest::Approx(-0.1).epsilon(1e-9));
}

TEST_CASE("pointgoal clips positions to the unit box and hits its time limit") {
    PointGoal2D env;
    env.reset(5);
    env.set_state(std::vector<double>{-1.0, -1.0});
    for (int t = 1; t <= 100; ++t) {
        const auto r = env.step(std::vector<double>{-0.1, -0.1});
        CHECK(r.next_state[0] == -1.0);
        CHECK(r.next_state[1] == -1.0);
        CHECK(r.termination ==
              (t == 100 ? Termination::time_limit : Termination::none));
    }
}

TEST_CASE("quadbandit is a one-step environment with a closed-form value") {
    QuadraticBandit env;
    env.reset(0);
    const auto r = env.step(std::vector<double>{0.9});
    CHECK(r.termination == Termination::true_terminal);
    CHECK(r.reward == doctest::Approx(-(0.9 - env.target_action()) *
                                      (0.9 - env.target_action())));
    CHECK_THROWS_AS(env.step(std::vector<double>{0.0}), std::logic_error);
    env.reset(0);
    CHECK(env.step(std::vector<double>{env.target_action()}).reward == 0.0);
}

TEST_CASE("monte carlo horizon cap truncates the discounted tail") {
    const int cap = mc_horizon_cap(0.99, 16.3);
    CHECK(std::pow(0.99, cap) * 16.3 < 1e-4);
    CHECK(std::pow(0.99, cap - 1) * 16.3 >= 1e-4);
    CHECK(mc_horizon_cap(0.0, 10.0) == 1);
}

TEST_CASE("mc_true_q on the bandit returns the closed form exactly") {
    QuadraticBandit env;
    Rng rng(40);
    Mlp actor = init_xavier({1, 8, 8, 1}, OutputActivation::scaled_tanh, 1.0, rng);
    for (double a : {-0.8, 0.0, 0.4, 0.77}) {
        const double q = mc_true_q(env, actor, std::vector<double>{0.0},
                                   std::vector<double>{a}, 0.99, 100, 1);
        CHECK(q == env.true_q(a));
    }
}

TEST_CASE("mc_true_q with gamma=0 returns the immediate reward only") {
    PointGoal2D env;
    Rng rng(41);
    Mlp actor = init_xavier({2, 8, 8, 2}, OutputActivation::scaled_tanh, 0.1, rng);
    const std::vector<double> s{0.0, 0.0};
    const std::vector<double> a{0.1, 0.0};
    const double q = mc_true_q(env, actor, s, a, 0.0, 50, 1);
    const double dist = std::hypot(0.1 - PointGoal2D::kGoalX, 0.0 - PointGoal2D::kGoalY);
    CHECK(q == doctest::Approx(-dist).epsilon(1e-12));
}

TEST_CASE("mc_true_q matches a hand-rolled goal-adjacent trajectory") {
    PointGoal2D env;
    Mlp idle;
    idle.dims = {2, 2};
    idle.output_activation = OutputActivation::scaled_tanh;
    idle.action_bound = 0.1;
    idle.params.assign(idle.param_count(), 0.0); // policy that always stands still

    // One step into the goal: return is the terminal reward alone.
    const std::vector<double> s{PointGoal2D::kGoalX - 0.06, PointGoal2D::kGoalY};
    const std::vector<double> a{0.06, 0.0};
    const double q = mc_true_q(env, idle, s, a, 0.99, 1000, 2);
    CHECK(q == doctest::Approx(PointGoal2D::kGoalBonus).epsilon(1e-12));

    // Starting two steps out with the same first action, the idle policy then
    // accrues the discounted standing penalty forever (up to the cap).
    const std::vector<double> s2{PointGoal2D::kGoalX - 0.3, PointGoal2D::kGoalY};
    const double q2 = mc_true_q(env, idle, s2, a, 0.5, 60, 2);
    double expected = -0.24; // first step lands 0.24 short of the goal
    double disc = 0.5;
    for (int k = 1; k < 60; ++k) {
        expected += disc * -0.24;
        disc *= 0.5;
    }
    CHECK(q2 == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("state injection is reported and enforced") {
    // A minimal environment without the capability.
    class NoInjection : public Environment {
      public:
        NoInjection() {
            spec_.name = "stub";
            spec_.state_dim = 1;
            spec_.action_dim = 1;
            spec_.reward_bound = 1.0;
        }
        const EnvSpec& spec() const override { return spec_; }
        std::vector<double> reset(std::uint64_t) override { return {0.0}; }
        StepResult step(std::span<const double>) override {
            return {{0.0}, 0.0, Termination::true_terminal};
        }

      private:
        EnvSpec spec_;
    };

    NoInjection env;
    CHECK(!env.supports_state_injection());
    CHECK_THROWS_AS(env.set_state(std::vector<double>{0.0}), CapabilityError);
    Rng rng(42);
    Mlp actor = init_xavier({1, 4, 1}, OutputActivation::scaled_tanh, 1.0, rng);
    CHECK_THROWS_AS(mc_true_q(env, actor, std::vector<double>{0.0},
                              std::vector<double>{0.0}, 0.9, 10, 1),
                    CapabilityError);
}
