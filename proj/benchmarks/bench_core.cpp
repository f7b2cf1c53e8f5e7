#include <benchmark/benchmark.h>

#include "awd3/agents.hpp"
#include "awd3/bias_stats.hpp"
#include "awd3/envs.hpp"

using namespace awd3;

namespace {

void BM_MlpForward(benchmark::State& state) {
    Rng rng(1);
    const int hidden = static_cast<int>(state.range(0));
    const Mlp critic =
        init_xavier({4, hidden, hidden, 1}, OutputActivation::identity, 1.0, rng);
    std::vector<double> input(4);
    for (double& x : input) x = rng.uniform(-1, 1);
    for (auto _ : state) {
        auto out = critic.forward(input);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_MlpForward)->Arg(64)->Arg(256);

void BM_MlpBackward(benchmark::State& state) {
    Rng rng(2);
    const int hidden = static_cast<int>(state.range(0));
    const Mlp critic =
        init_xavier({4, hidden, hidden, 1}, OutputActivation::identity, 1.0, rng);
    std::vector<double> input(4);
    for (double& x : input) x = rng.uniform(-1, 1);
    std::vector<double> grad(critic.param_count(), 0.0);
    const double unit[1] = {1.0};
    for (auto _ : state) {
        auto in_grad = critic.backward(input, unit, grad);
        benchmark::DoNotOptimize(in_grad);
    }
}
BENCHMARK(BM_MlpBackward)->Arg(64)->Arg(256);

void BM_ExpectedMin(benchmark::State& state) {
    const GaussianErrorModel m{0.3, -0.2, 1.0, 0.5, 0.4};
    for (auto _ : state) benchmark::DoNotOptimize(expected_min(m));
}
BENCHMARK(BM_ExpectedMin);

void BM_McMinOracle(benchmark::State& state) {
    const GaussianErrorModel m{0.3, -0.2, 1.0, 0.5, 0.4};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto est = mc_min_oracle(m, 100000, seed++);
        benchmark::DoNotOptimize(est);
    }
}
BENCHMARK(BM_McMinOracle);

void BM_ReplaySample(benchmark::State& state) {
    ReplayBuffer buf(100000, 3, 1);
    Rng rng(3);
    for (int i = 0; i < 100000; ++i)
        buf.push(Transition{{0.0, 0.0, 0.0}, {0.0}, 0.0, {0.0, 0.0, 0.0},
                            Termination::none});
    for (auto _ : state) {
        auto idx = buf.sample_indices(100, rng);
        benchmark::DoNotOptimize(idx);
    }
}
BENCHMARK(BM_ReplaySample);

void BM_TrainStepBandit(benchmark::State& state) {
    // Cost of one full training step (critic + amortized actor/targets),
    // measured by advancing a short run one step at a time.
    AgentConfig cfg;
    cfg.algorithm = Algorithm::awd3;
    cfg.total_steps = 1;
    cfg.exploration_phase_steps = 0;
    cfg.beta_warmup_steps = 0;
    cfg.batch_size = 64;
    cfg.hidden1 = cfg.hidden2 = 16;
    cfg.eval_interval = 0;
    cfg.bias_interval = 0;
    cfg.beta_trace_interval = 0;
    cfg.resolve_defaults();

    const QuadraticBandit bandit;
    AgentState agent = make_agent(cfg, bandit.spec(), 4);
    ReplayBuffer buf(10000, 1, 1);
    Rng fill(5);
    for (int i = 0; i < 2000; ++i) {
        const double a = fill.uniform(-1, 1);
        buf.push(Transition{{0.0}, {a}, -(a - 0.4) * (a - 0.4), {0.0},
                            Termination::true_terminal});
    }
    std::vector<const Transition*> batch;
    for (auto _ : state) {
        batch.clear();
        for (std::size_t i : buf.sample_indices(cfg.batch_size, agent.sampling_rng))
            batch.push_back(&buf.at(i));
        benchmark::DoNotOptimize(critic_update(agent, batch));
        if (agent.t % cfg.policy_delay == 0) {
            actor_update(agent, batch);
            soft_update(agent.actor_target, agent.actor, cfg.tau);
            for (std::size_t i = 0; i < agent.critics.size(); ++i)
                soft_update(agent.critic_targets[i], agent.critics[i], cfg.tau);
        }
        agent.t += 1;
    }
}
BENCHMARK(BM_TrainStepBandit);

} // namespace

BENCHMARK_MAIN();
