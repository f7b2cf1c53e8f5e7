#include "awd3/verify.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "awd3/bias_stats.hpp"
#include "awd3/checkpoint.hpp"
#include "awd3/envs.hpp"
#include "awd3/errors.hpp"

namespace awd3 {

namespace {

struct CheckContext {
    const VerifyOptions* options = nullptr;
    std::ostringstream detail;
    bool ok = true;

    void expect(bool condition, const std::string& message) {
        if (!condition) {
            ok = false;
            if (!detail.str().empty()) detail << "; ";
            detail << message;
        }
    }
};

// Relative error with a floor, so dead-zero gradients do not divide by zero.
double rel_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

void check_gradients(CheckContext& ctx, const Mlp& net_in,
                     const std::vector<double>& input) {
    Mlp net = net_in;
    std::vector<double> probe_vec(net.output_dim());
    Rng rng(77);
    for (double& v : probe_vec) v = rng.uniform(-1.0, 1.0);

    std::vector<double> grad(net.param_count(), 0.0);
    net.backward(input, probe_vec, grad);
    if (ctx.options->inject_fault == "gradient")
        for (double& g : grad) g = g * 1.01 + 1e-3;

    const double h = 1e-5;
    double max_err = 0.0;
    const int probes = 120;
    for (int p = 0; p < probes; ++p) {
        const std::size_t i = rng.uniform_index(net.param_count());
        const double saved = net.params[i];
        net.params[i] = saved + h;
        const std::vector<double> up = net.forward(input);
        net.params[i] = saved - h;
        const std::vector<double> down = net.forward(input);
        net.params[i] = saved;
        double numeric = 0.0;
        for (int o = 0; o < net.output_dim(); ++o)
            numeric += probe_vec[o] * (up[o] - down[o]);
        numeric /= 2.0 * h;
        max_err = std::max(max_err, rel_error(numeric, grad[i]));
    }
    std::ostringstream msg;
    msg << "max relative gradient error " << max_err;
    ctx.expect(max_err < 1e-4, msg.str());
}

using CheckFn = std::function<void(CheckContext&)>;

struct NamedCheck {
    std::string name;
    CheckFn fn;
};

std::vector<NamedCheck> build_checks() {
    std::vector<NamedCheck> checks;

    checks.push_back({"nn.gradient_check_critic", [](CheckContext& ctx) {
        Rng rng(11);
        Mlp critic = init_xavier({4, 64, 64, 1}, OutputActivation::identity, 1.0, rng);
        std::vector<double> input(4);
        for (double& x : input) x = rng.uniform(-1.0, 1.0);
        check_gradients(ctx, critic, input);
    }});

    checks.push_back({"nn.gradient_check_actor", [](CheckContext& ctx) {
        Rng rng(12);
        Mlp actor = init_xavier({3, 64, 64, 1}, OutputActivation::scaled_tanh, 2.0, rng);
        std::vector<double> input(3);
        for (double& x : input) x = rng.uniform(-1.0, 1.0);
        check_gradients(ctx, actor, input);
    }});

    checks.push_back({"nn.adam_first_step", [](CheckContext& ctx) {
        std::vector<double> w = {1.0, -2.0};
        const std::vector<double> g = {0.3, -0.7};
        AdamState st(2, 1e-3);
        adam_step(w, g, st);
        for (int i = 0; i < 2; ++i) {
            const double expected = (i == 0 ? 1.0 : -2.0) -
                                    st.lr * g[i] / (std::abs(g[i]) + st.eps);
            ctx.expect(std::abs(w[i] - expected) < 1e-15, "first-step value off");
        }
        ctx.expect(st.step == 1, "step counter not incremented");
    }});

    checks.push_back({"labels.wd3_beta1_equals_td3", [](CheckContext& ctx) {
        Rng rng(21);
        for (int k = 0; k < 1000; ++k) {
            const double r = rng.uniform(-5, 5), g = rng.uniform01();
            const double q1 = rng.uniform(-10, 10), q2 = rng.uniform(-10, 10);
            ctx.expect(std::abs(target_label_wd3(r, g, q1, q2, 1.0) -
                                target_label_td3(r, g, q1, q2)) < 1e-12,
                       "wd3(beta=1) != td3");
        }
    }});

    checks.push_back({"labels.wd3_beta0_equals_average", [](CheckContext& ctx) {
        Rng rng(22);
        for (int k = 0; k < 1000; ++k) {
            const double r = rng.uniform(-5, 5), g = rng.uniform01();
            const double q1 = rng.uniform(-10, 10), q2 = rng.uniform(-10, 10);
            ctx.expect(std::abs(target_label_wd3(r, g, q1, q2, 0.0) -
                                (r + g * 0.5 * (q1 + q2))) < 1e-12,
                       "wd3(beta=0) != average");
        }
    }});

    checks.push_back({"labels.tcd3_matches_bruteforce", [](CheckContext& ctx) {
        Rng rng(23);
        for (int k = 0; k < 1000; ++k) {
            const double r = rng.uniform(-5, 5), g = rng.uniform01();
            const double q1 = rng.uniform(-10, 10), q2 = rng.uniform(-10, 10);
            const double q3 = rng.uniform(-10, 10);
            const double inner = std::min(std::max(q1, q2), q3);
            ctx.expect(std::abs(target_label_tcd3(r, g, q1, q2, q3) - (r + g * inner)) <
                           1e-12,
                       "tcd3 label mismatch");
        }
    }});

    checks.push_back({"bias.iid_theorem_case", [](CheckContext& ctx) {
        for (double sigma : {0.1, 1.0, 10.0}) {
            GaussianErrorModel m{0.0, 0.0, sigma, sigma, 0.0};
            const double expected = -sigma / std::sqrt(3.141592653589793);
            ctx.expect(std::abs(expected_min(m) - expected) < 1e-12,
                       "iid zero-mean case does not match -sigma/sqrt(pi)");
        }
    }});

    checks.push_back({"bias.closed_form_vs_mc", [](CheckContext& ctx) {
        std::uint64_t seed = 1500;
        for (double mu : {-1.0, 0.0, 1.0})
            for (double sigma : {0.5, 2.0})
                for (double rho : {-0.5, 0.9}) {
                    GaussianErrorModel m{mu, mu, sigma, sigma, rho};
                    const auto mc = mc_min_oracle(m, 200000, seed++);
                    ctx.expect(std::abs(expected_min(m) - mc.mean) <= 3.0 * mc.std_error,
                               "closed form disagrees with the sampling oracle");
                }
    }});

    checks.push_back({"bias.optimal_beta_zero_bias", [](CheckContext& ctx) {
        Rng rng(31);
        for (int k = 0; k < 200; ++k) {
            const double mu = rng.uniform(-2, 2);
            GaussianErrorModel m{mu, mu, rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0),
                                 rng.uniform(-0.9, 0.9)};
            ctx.expect(std::abs(expected_weighted_bias(m, optimal_beta(m))) < 1e-10,
                       "optimal beta does not zero the expected bias");
        }
    }});

    checks.push_back({"replay.last_terminal_filtering", [](CheckContext& ctx) {
        ReplayBuffer buffer(8, 1, 1);
        Transition terminal{{0.0}, {0.0}, 1.0, {0.0}, Termination::true_terminal};
        Transition cutoff{{0.0}, {0.0}, 2.0, {0.0}, Termination::time_limit};
        buffer.push(terminal);
        buffer.push(cutoff);
        ctx.expect(buffer.last_terminal().has_value() &&
                       buffer.last_terminal()->reward == 1.0,
                   "time-limit transition overwrote the stored terminal");
    }});

    checks.push_back({"beta.time_limit_filtering", [](CheckContext& ctx) {
        AgentConfig cfg;
        cfg.algorithm = Algorithm::awd3;
        cfg.total_steps = 1200;
        cfg.exploration_phase_steps = 200;
        cfg.beta_warmup_steps = 300;
        cfg.batch_size = 32;
        cfg.hidden1 = cfg.hidden2 = 24;
        cfg.eval_interval = 0;
        cfg.bias_interval = 0;
        cfg.beta_trace_interval = 100;
        bool beta_moved = false;
        const RunArtifacts run = train(
            cfg, [] { return make_env("pendulum"); }, 3,
            [&](const StepInfo& info) {
                if (info.agent->beta != cfg.beta_init) beta_moved = true;
            });
        ctx.expect(!beta_moved, "beta moved on a time-limit-only environment");
        ctx.expect(run.final_state->beta == cfg.beta_init, "final beta drifted");
    }});

    checks.push_back({"beta.range_clamp", [](CheckContext& ctx) {
        AgentConfig cfg;
        cfg.total_steps = 100;
        cfg.resolve_defaults();
        const QuadraticBandit bandit;
        AgentState state = make_agent(cfg, bandit.spec(), 5);
        state.config.beta_lr = 0.5; // exaggerate to force clamping
        Rng rng(55);
        for (int k = 0; k < 300; ++k) {
            Transition tr{{0.0}, {rng.uniform(-1, 1)}, rng.uniform(-30, 30), {0.0},
                          Termination::true_terminal};
            const double b = beta_update(state, tr);
            ctx.expect(b >= cfg.beta_min && b <= cfg.beta_max, "beta left its range");
        }
    }});

    checks.push_back({"checkpoint.roundtrip", [](CheckContext& ctx) {
        AgentConfig cfg;
        cfg.total_steps = 100;
        cfg.resolve_defaults();
        const QuadraticBandit bandit;
        AgentState state = make_agent(cfg, bandit.spec(), 17);
        state.beta = 1.25;
        state.t = 42;
        const auto path = std::filesystem::temp_directory_path() / "awd3_verify_ckpt.ckpt";
        save_checkpoint(path, state);
        const AgentState loaded = load_checkpoint(path);
        std::filesystem::remove(path);
        ctx.expect(loaded.actor.params == state.actor.params, "actor params changed");
        ctx.expect(loaded.critics.size() == state.critics.size() &&
                       loaded.critics[0].params == state.critics[0].params,
                   "critic params changed");
        ctx.expect(loaded.beta == state.beta && loaded.t == state.t,
                   "beta or step counter changed");
        ctx.expect(loaded.sampling_rng.state() == state.sampling_rng.state(),
                   "generator state changed");
    }});

    return checks;
}

} // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options, std::ostream& out) {
    std::vector<CheckResult> results;
    for (const auto& check : build_checks()) {
        if (!options.filter.empty() &&
            check.name.find(options.filter) == std::string::npos)
            continue;
        CheckContext ctx;
        ctx.options = &options;
        try {
            check.fn(ctx);
        } catch (const std::exception& e) {
            ctx.ok = false;
            ctx.detail << "exception: " << e.what();
        }
        CheckResult res{check.name, ctx.ok, ctx.detail.str()};
        out << (res.passed ? "PASS  " : "FAIL  ") << res.name;
        if (!res.passed && !res.detail.empty()) out << "  (" << res.detail << ")";
        out << "\n";
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace awd3
