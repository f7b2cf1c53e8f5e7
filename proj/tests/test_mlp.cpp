#include <doctest.h>

#include <cmath>

#include "awd3/errors.hpp"
#include "awd3/mlp.hpp"

using namespace awd3;

namespace {

// Straight-line reimplementation of the forward pass, kept deliberately
// independent of Mlp's internals.
std::vector<double> naive_forward(const Mlp& net, const std::vector<double>& input) {
    std::vector<double> act = input;
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
        const int in = net.dims[l];
        const int out = net.dims[l + 1];
        std::vector<double> next(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double z = net.params[off + static_cast<std::size_t>(out) * in + o]; // bias
            for (int i = 0; i < in; ++i)
                z += net.params[off + static_cast<std::size_t>(o) * in + i] * act[i];
            if (l + 2 < net.dims.size()) {
                next[o] = std::max(0.0, z);
            } else if (net.output_activation == OutputActivation::identity) {
                next[o] = z;
            } else {
                next[o] = net.action_bound * std::tanh(z);
            }
        }
        act = next;
        off += static_cast<std::size_t>(out) * in + out;
    }
    return act;
}

double gradcheck_max_rel_error(Mlp& net, const std::vector<double>& input,
                               const std::vector<double>& probe) {
    std::vector<double> grad(net.param_count(), 0.0);
    net.backward(input, probe, grad);

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < net.param_count(); ++i) {
        const double saved = net.params[i];
        net.params[i] = saved + h;
        const auto up = net.forward(input);
        net.params[i] = saved - h;
        const auto down = net.forward(input);
        net.params[i] = saved;
        double numeric = 0.0;
        for (std::size_t o = 0; o < probe.size(); ++o)
            numeric += probe[o] * (up[o] - down[o]);
        numeric /= 2.0 * h;
        const double denom = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
        worst = std::max(worst, std::abs(numeric - grad[i]) / denom);
    }
    return worst;
}

} // namespace

TEST_CASE("zero network maps everything to the zero-input activation") {
    Mlp net;
    net.dims = {3, 4, 2};
    net.params.assign(net.param_count(), 0.0);
    const auto out = net.forward(std::vector<double>{1.0, -2.0, 0.5});
    CHECK(out == std::vector<double>{0.0, 0.0});

    net.output_activation = OutputActivation::scaled_tanh;
    net.action_bound = 2.0;
    const auto bounded = net.forward(std::vector<double>{1.0, -2.0, 0.5});
    CHECK(bounded == std::vector<double>{0.0, 0.0}); // tanh(0) == 0
}

TEST_CASE("single linear unit passes its input through") {
    Mlp net;
    net.dims = {1, 1};
    net.params = {1.0, 0.0}; // weight 1, bias 0
    for (double x : {-3.0, 0.0, 0.25, 7.5})
        CHECK(net.forward(std::vector<double>{x}) == std::vector<double>{x});
}

TEST_CASE("forward pass matches a straight-line recompute") {
    Rng rng(100);
    for (auto act : {OutputActivation::identity, OutputActivation::scaled_tanh}) {
        Mlp net = init_xavier({5, 16, 16, 3}, act, 1.5, rng);
        for (int k = 0; k < 20; ++k) {
            std::vector<double> input(5);
            for (double& x : input) x = rng.uniform(-2, 2);
            const auto a = net.forward(input);
            const auto b = naive_forward(net, input);
            for (std::size_t i = 0; i < a.size(); ++i)
                CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("forward pass is pure") {
    Rng rng(101);
    Mlp net = init_xavier({4, 8, 2}, OutputActivation::identity, 1.0, rng);
    const std::vector<double> input{0.1, -0.4, 0.9, 0.0};
    const auto params_before = net.params;
    CHECK(net.forward(input) == net.forward(input));
    CHECK(net.params == params_before);
}

TEST_CASE("shape errors on mismatched dimensions") {
    Rng rng(102);
    Mlp net = init_xavier({3, 4, 1}, OutputActivation::identity, 1.0, rng);
    CHECK_THROWS_AS(net.forward(std::vector<double>{1.0, 2.0}), ShapeError);
    std::vector<double> grad(net.param_count(), 0.0);
    CHECK_THROWS_AS(net.backward(std::vector<double>{1.0, 2.0, 3.0},
                                 std::vector<double>{1.0, 1.0}, grad),
                    ShapeError);
    std::vector<double> bad_grad(3, 0.0);
    CHECK_THROWS_AS(net.backward(std::vector<double>{1.0, 2.0, 3.0},
                                 std::vector<double>{1.0}, bad_grad),
                    ShapeError);
}

TEST_CASE("single-layer gradient equals the least-squares closed form") {
    // f(w, b) = w.x + b trained on squared error: d/dw 0.5*(f - y)^2 = (f - y) x.
    Mlp net;
    net.dims = {2, 1};
    net.params = {0.5, -1.0, 0.25};
    const std::vector<double> x{1.5, -2.0};
    const double y = 3.0;
    const double f = net.forward(x)[0];
    std::vector<double> grad(net.param_count(), 0.0);
    net.backward(x, std::vector<double>{f - y}, grad);
    CHECK(grad[0] == doctest::Approx((f - y) * x[0]).epsilon(1e-14));
    CHECK(grad[1] == doctest::Approx((f - y) * x[1]).epsilon(1e-14));
    CHECK(grad[2] == doctest::Approx(f - y).epsilon(1e-14));
}

TEST_CASE("zero output gradient produces zero parameter gradients") {
    Rng rng(103);
    Mlp net = init_xavier({3, 8, 8, 2}, OutputActivation::scaled_tanh, 1.0, rng);
    std::vector<double> grad(net.param_count(), 0.0);
    const auto input_grad = net.backward(std::vector<double>{0.3, -0.7, 0.1},
                                         std::vector<double>{0.0, 0.0}, grad);
    for (double g : grad) CHECK(g == 0.0);
    for (double g : input_grad) CHECK(g == 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(104);
    SUBCASE("critic-shaped network") {
        Mlp net = init_xavier({4, 12, 12, 1}, OutputActivation::identity, 1.0, rng);
        std::vector<double> input(4);
        for (double& x : input) x = rng.uniform(-1, 1);
        CHECK(gradcheck_max_rel_error(net, input, {1.0}) < 1e-4);
    }
    SUBCASE("actor-shaped network") {
        Mlp net = init_xavier({3, 12, 12, 2}, OutputActivation::scaled_tanh, 2.0, rng);
        std::vector<double> input(3);
        for (double& x : input) x = rng.uniform(-1, 1);
        CHECK(gradcheck_max_rel_error(net, input, {0.7, -0.4}) < 1e-4);
    }
}

TEST_CASE("input gradient matches finite differences") {
    Rng rng(105);
    Mlp net = init_xavier({4, 10, 1}, OutputActivation::identity, 1.0, rng);
    std::vector<double> input(4);
    for (double& x : input) x = rng.uniform(-1, 1);
    std::vector<double> scratch(net.param_count(), 0.0);
    const auto input_grad = net.backward(input, std::vector<double>{1.0}, scratch);
    const double h = 1e-5;
    for (int i = 0; i < 4; ++i) {
        auto up = input, down = input;
        up[i] += h;
        down[i] -= h;
        const double numeric = (net.forward(up)[0] - net.forward(down)[0]) / (2 * h);
        CHECK(input_grad[i] == doctest::Approx(numeric).epsilon(1e-4));
    }
}

TEST_CASE("adam leaves parameters untouched on a zero gradient") {
    std::vector<double> w{1.0, -0.5, 2.0};
    const auto before = w;
    AdamState st(3);
    adam_step(w, std::vector<double>{0.0, 0.0, 0.0}, st);
    CHECK(w == before);
    CHECK(st.step == 1);
}

TEST_CASE("first adam step from fresh state has the sign-scaled magnitude") {
    std::vector<double> w{0.0, 0.0};
    const std::vector<double> g{0.4, -2.5};
    AdamState st(2, 1e-3);
    adam_step(w, g, st);
    for (int i = 0; i < 2; ++i)
        CHECK(w[i] == doctest::Approx(-st.lr * g[i] / (std::abs(g[i]) + st.eps))
                          
                          .scale(1e-15));
}

TEST_CASE("adam descends a quadratic bowl") {
    // f(w) = w^2, gradient 2w, from w = 1.
    std::vector<double> w{1.0};
    AdamState st(1, 0.01);
    double prev = w[0];
    for (int k = 0; k < 100; ++k) {
        adam_step(w, std::vector<double>{2.0 * w[0]}, st);
        if (k < 50) {
            CHECK(w[0] < prev);
            prev = w[0];
        }
    }
    CHECK(std::abs(w[0]) < 0.5);
}

TEST_CASE("adam shape mismatch throws") {
    std::vector<double> w{1.0, 2.0};
    AdamState st(3);
    CHECK_THROWS_AS(adam_step(w, std::vector<double>{0.0, 0.0}, st), ShapeError);
}

TEST_CASE("soft update blends toward the online network") {
    Rng rng(106);
    Mlp online = init_xavier({2, 6, 1}, OutputActivation::identity, 1.0, rng);
    Mlp target = init_xavier({2, 6, 1}, OutputActivation::identity, 1.0, rng);

    SUBCASE("tau=1 copies exactly") {
        soft_update(target, online, 1.0);
        CHECK(target.params == online.params);
    }

    SUBCASE("tau=5e-3 on a zero target picks up that fraction") {
        target.params.assign(target.param_count(), 0.0);
        Mlp ones = online;
        ones.params.assign(ones.param_count(), 1.0);
        soft_update(target, ones, 5e-3);
        for (double p : target.params) CHECK(p == doctest::Approx(5e-3).epsilon(1e-15));
    }

    SUBCASE("repeated updates converge geometrically") {
        double prev = -1.0;
        for (int k = 0; k < 50; ++k) {
            double dist = 0.0;
            for (std::size_t i = 0; i < target.params.size(); ++i)
                dist = std::max(dist, std::abs(target.params[i] - online.params[i]));
            if (prev >= 0.0) CHECK(dist == doctest::Approx(prev * (1.0 - 0.1)).epsilon(1e-9));
            prev = dist;
            soft_update(target, online, 0.1);
        }
    }

    SUBCASE("composition of two updates is one with the combined rate") {
        Mlp a = target, b = target;
        soft_update(a, online, 0.3);
        soft_update(a, online, 0.2);
        soft_update(b, online, 1.0 - (1.0 - 0.3) * (1.0 - 0.2));
        for (std::size_t i = 0; i < a.params.size(); ++i)
            CHECK(a.params[i] == doctest::Approx(b.params[i]).epsilon(1e-12));
    }

    SUBCASE("architecture mismatch throws") {
        Rng r2(107);
        Mlp other = init_xavier({2, 7, 1}, OutputActivation::identity, 1.0, r2);
        CHECK_THROWS_AS(soft_update(other, online, 0.5), ShapeError);
    }
}

TEST_CASE("xavier init is deterministic, bounded and has the right spread") {
    Rng a(55), b(55);
    const Mlp n1 = init_xavier({256, 256}, OutputActivation::identity, 1.0, a);
    const Mlp n2 = init_xavier({256, 256}, OutputActivation::identity, 1.0, b);
    CHECK(n1.params == n2.params);

    const double bound = std::sqrt(6.0 / (256 + 256));
    double sum = 0.0, sum_sq = 0.0;
    const std::size_t n_weights = 256 * 256;
    for (std::size_t i = 0; i < n_weights; ++i) {
        CHECK(std::abs(n1.params[i]) <= bound);
        sum += n1.params[i];
        sum_sq += n1.params[i] * n1.params[i];
    }
    const double mean = sum / n_weights;
    const double var = sum_sq / n_weights - mean * mean;
    CHECK(var == doctest::Approx(2.0 / (256 + 256)).epsilon(0.2));

    // biases zero
    for (std::size_t i = n_weights; i < n1.param_count(); ++i) CHECK(n1.params[i] == 0.0);
}

TEST_CASE("actor outputs respect the action bound everywhere") {
    Rng rng(56);
    Mlp actor = init_xavier({3, 32, 32, 2}, OutputActivation::scaled_tanh, 0.7, rng);
    // exaggerate the weights to push tanh toward saturation
    for (double& p : actor.params) p *= 40.0;
    for (int k = 0; k < 10000; ++k) {
        std::vector<double> input(3);
        for (double& x : input) x = rng.uniform(-50, 50);
        for (double a : actor.forward(input)) CHECK(std::abs(a) <= 0.7);
    }
}
