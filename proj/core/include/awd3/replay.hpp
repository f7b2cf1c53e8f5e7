#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "awd3/rng.hpp"

namespace awd3 {

/// How an environment step ended its episode, if at all. Time-limit cutoffs
/// are bookkept separately from genuine terminal states: they bootstrap like
/// ordinary transitions and never feed the beta update.
enum class Termination {
    none,
    true_terminal,
    time_limit,
};

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    Termination termination = Termination::none;
};

/// Fixed-capacity ring buffer with uniform sampling (with replacement) and
/// O(1) access to the most recent true-terminal transition.
class ReplayBuffer {
  public:
    ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return storage_.size(); }
    bool empty() const { return storage_.empty(); }

    /// Stores a transition, evicting the oldest once full. ShapeError if the
    /// vector dimensions do not match the declared dims.
    void push(Transition t);

    const Transition& at(std::size_t i) const { return storage_[i]; }

    /// n independent uniform draws with replacement. Throws on empty buffer.
    std::vector<Transition> sample_uniform(std::size_t n, Rng& rng) const;

    /// Index form of sample_uniform; avoids copying in the training loop.
    std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

    /// Most recent termination == true_terminal transition, if any was stored.
    const std::optional<Transition>& last_terminal() const { return last_terminal_; }

  private:
    std::size_t capacity_;
    int state_dim_;
    int action_dim_;
    std::vector<Transition> storage_;
    std::size_t write_cursor_ = 0;
    std::optional<Transition> last_terminal_;
};

} // namespace awd3
