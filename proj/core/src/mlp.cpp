#include "awd3/mlp.hpp"

#include <cmath>
#include <cstring>

#include "awd3/errors.hpp"

namespace awd3 {

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l)
        n += static_cast<std::size_t>(dims[l + 1]) * dims[l] + dims[l + 1];
    return n;
}

std::size_t Mlp::layer_offset(std::size_t layer) const {
    std::size_t off = 0;
    for (std::size_t l = 0; l < layer; ++l)
        off += static_cast<std::size_t>(dims[l + 1]) * dims[l] + dims[l + 1];
    return off;
}

bool Mlp::same_architecture(const Mlp& other) const {
    return dims == other.dims && output_activation == other.output_activation &&
           action_bound == other.action_bound;
}

namespace {

struct ForwardTrace {
    // activations[0] is the input; activations[l+1] the output of layer l.
    std::vector<std::vector<double>> activations;
    // pre_activations[l] is W*a + b of layer l.
    std::vector<std::vector<double>> pre_activations;
};

void run_forward(const Mlp& net, std::span<const double> input, ForwardTrace* trace,
                 std::vector<double>& out) {
    if (static_cast<int>(input.size()) != net.input_dim())
        throw ShapeError("Mlp::forward: input length does not match first layer");

    std::vector<double> act(input.begin(), input.end());
    if (trace) trace->activations.push_back(act);

    const std::size_t n_layers = net.layer_count();
    std::size_t off = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const int in = net.dims[l];
        const int out_dim = net.dims[l + 1];
        const double* w = net.params.data() + off;
        const double* b = w + static_cast<std::size_t>(out_dim) * in;

        std::vector<double> z(out_dim);
        for (int o = 0; o < out_dim; ++o) {
            const double* row = w + static_cast<std::size_t>(o) * in;
            double acc = b[o];
            for (int i = 0; i < in; ++i) acc += row[i] * act[i];
            z[o] = acc;
        }
        if (trace) trace->pre_activations.push_back(z);

        const bool last = (l + 1 == n_layers);
        std::vector<double> a(out_dim);
        if (!last) {
            for (int o = 0; o < out_dim; ++o) a[o] = z[o] > 0.0 ? z[o] : 0.0;
        } else if (net.output_activation == OutputActivation::identity) {
            a = z;
        } else {
            for (int o = 0; o < out_dim; ++o) a[o] = net.action_bound * std::tanh(z[o]);
        }
        if (trace) trace->activations.push_back(a);
        act = std::move(a);
        off += static_cast<std::size_t>(out_dim) * in + out_dim;
    }
    out = std::move(act);
}

} // namespace

std::vector<double> Mlp::forward(std::span<const double> input) const {
    std::vector<double> out;
    run_forward(*this, input, nullptr, out);
    return out;
}

std::vector<double> Mlp::backward(std::span<const double> input,
                                  std::span<const double> output_gradient,
                                  std::span<double> param_grad,
                                  double scale) const {
    if (static_cast<int>(output_gradient.size()) != output_dim())
        throw ShapeError("Mlp::backward: output_gradient length mismatch");
    if (param_grad.size() != param_count())
        throw ShapeError("Mlp::backward: param_grad length mismatch");

    ForwardTrace trace;
    std::vector<double> out;
    run_forward(*this, input, &trace, out);

    const std::size_t n_layers = layer_count();

    // Delta at the output layer.
    std::vector<double> delta(output_gradient.begin(), output_gradient.end());
    if (output_activation == OutputActivation::scaled_tanh) {
        const auto& z = trace.pre_activations[n_layers - 1];
        for (std::size_t o = 0; o < delta.size(); ++o) {
            const double t = std::tanh(z[o]);
            delta[o] *= action_bound * (1.0 - t * t);
        }
    }

    for (std::size_t l = n_layers; l-- > 0;) {
        const int in = dims[l];
        const int out_dim = dims[l + 1];
        const std::size_t off = layer_offset(l);
        const double* w = params.data() + off;
        double* gw = param_grad.data() + off;
        double* gb = gw + static_cast<std::size_t>(out_dim) * in;
        const auto& a_prev = trace.activations[l];

        for (int o = 0; o < out_dim; ++o) {
            const double d = delta[o];
            double* grow = gw + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) grow[i] += scale * d * a_prev[i];
            gb[o] += scale * d;
        }

        std::vector<double> delta_prev(in, 0.0);
        for (int o = 0; o < out_dim; ++o) {
            const double d = delta[o];
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) delta_prev[i] += row[i] * d;
        }
        if (l > 0) {
            const auto& z_prev = trace.pre_activations[l - 1];
            for (int i = 0; i < in; ++i)
                if (z_prev[i] <= 0.0) delta_prev[i] = 0.0;
        }
        delta = std::move(delta_prev);
    }
    return delta; // gradient with respect to the input
}

Mlp init_xavier(const std::vector<int>& dims, OutputActivation activation,
                double action_bound, Rng& rng) {
    if (dims.size() < 2)
        throw ShapeError("init_xavier: need at least an input and an output dimension");
    for (int d : dims)
        if (d < 1) throw ShapeError("init_xavier: dimensions must be positive");

    Mlp net;
    net.dims = dims;
    net.output_activation = activation;
    net.action_bound = action_bound;
    net.params.assign(net.param_count(), 0.0);

    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const int in = dims[l];
        const int out = dims[l + 1];
        const double bound = std::sqrt(6.0 / (in + out));
        double* w = net.params.data() + off;
        for (std::size_t k = 0; k < static_cast<std::size_t>(out) * in; ++k)
            w[k] = rng.uniform(-bound, bound);
        // biases stay zero
        off += static_cast<std::size_t>(out) * in + out;
    }
    return net;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
    if (!target.same_architecture(online))
        throw ShapeError("soft_update: architecture mismatch");
    const std::size_t n = target.params.size();
    for (std::size_t i = 0; i < n; ++i)
        target.params[i] = tau * online.params[i] + (1.0 - tau) * target.params[i];
}

AdamState::AdamState(std::size_t n_params, double lr)
    : m(n_params, 0.0), v(n_params, 0.0), lr(lr) {}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw ShapeError("adam_step: shape mismatch between params, grads and state");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

} // namespace awd3
