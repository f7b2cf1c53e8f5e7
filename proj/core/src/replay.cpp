#include "awd3/replay.hpp"

#include "awd3/errors.hpp"

namespace awd3 {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
    if (capacity_ < 1) throw ShapeError("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
    if (static_cast<int>(t.state.size()) != state_dim_ ||
        static_cast<int>(t.next_state.size()) != state_dim_ ||
        static_cast<int>(t.action.size()) != action_dim_)
        throw ShapeError("ReplayBuffer::push: transition dims do not match buffer dims");

    if (t.termination == Termination::true_terminal) last_terminal_ = t;

    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[write_cursor_] = std::move(t);
    }
    write_cursor_ = (write_cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
    if (storage_.empty())
        throw ShapeError("ReplayBuffer: cannot sample from an empty buffer");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = rng.uniform_index(storage_.size());
    return idx;
}

std::vector<Transition> ReplayBuffer::sample_uniform(std::size_t n, Rng& rng) const {
    std::vector<Transition> batch;
    batch.reserve(n);
    for (std::size_t i : sample_indices(n, rng)) batch.push_back(storage_[i]);
    return batch;
}

} // namespace awd3
