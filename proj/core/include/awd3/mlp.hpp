#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "awd3/rng.hpp"

namespace awd3 {

enum class OutputActivation {
    identity,    // critics
    scaled_tanh, // actor: action_bound * tanh(x)
};

/// Fully connected feed-forward network with rectifier hidden units, stored
/// as one flat parameter vector (per layer: row-major weights, then biases).
/// The flat layout is shared by the Adam state, the soft target update and
/// the checkpoint format.
struct Mlp {
    std::vector<int> dims;                  // e.g. {4, 64, 64, 1}
    OutputActivation output_activation = OutputActivation::identity;
    double action_bound = 1.0;              // scaled_tanh only
    std::vector<double> params;

    int input_dim() const { return dims.front(); }
    int output_dim() const { return dims.back(); }
    std::size_t layer_count() const { return dims.size() - 1; }
    std::size_t param_count() const;

    /// Offset of layer l's weight block inside params; biases follow the
    /// out*in weights of the same layer.
    std::size_t layer_offset(std::size_t layer) const;

    bool same_architecture(const Mlp& other) const;

    /// Deterministic forward pass. Throws ShapeError on input length mismatch.
    std::vector<double> forward(std::span<const double> input) const;

    /// Reverse-mode gradients of (output_gradient . output) with respect to
    /// every parameter and to the input. Parameter gradients are scaled by
    /// `scale` and accumulated into param_grad (size param_count());
    /// the returned vector is the input gradient (not scaled).
    std::vector<double> backward(std::span<const double> input,
                                 std::span<const double> output_gradient,
                                 std::span<double> param_grad,
                                 double scale = 1.0) const;
};

/// Weights uniform in +/- sqrt(6/(fan_in+fan_out)), biases zero.
Mlp init_xavier(const std::vector<int>& dims, OutputActivation activation,
                double action_bound, Rng& rng);

/// target <- tau*online + (1-tau)*target, elementwise.
/// Throws ShapeError unless architectures are identical.
void soft_update(Mlp& target, const Mlp& online, double tau);

/// Per-parameter Adam moments for one network.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long long step = 0;
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n_params, double lr = 3e-4);
};

/// One Adam update with bias correction; params and grads must match the
/// state's accumulator shape.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state);

} // namespace awd3
