#include <doctest.h>

#include <cmath>
#include <set>

#include "awd3/errors.hpp"
#include "awd3/replay.hpp"

using namespace awd3;

namespace {
Transition make_tr(double tag, Termination term = Termination::none) {
    return Transition{{tag}, {tag}, tag, {tag}, term};
}
} // namespace

TEST_CASE("push counts and FIFO eviction") {
    ReplayBuffer buf(3, 1, 1);
    CHECK(buf.empty());
    buf.push(make_tr(0));
    CHECK(buf.size() == 1);
    buf.push(make_tr(1));
    buf.push(make_tr(2));
    CHECK(buf.size() == 3);

    buf.push(make_tr(3)); // evicts the oldest
    CHECK(buf.size() == 3);
    std::set<double> rewards;
    for (std::size_t i = 0; i < buf.size(); ++i) rewards.insert(buf.at(i).reward);
    CHECK(rewards == std::set<double>{1.0, 2.0, 3.0});

    buf.push(make_tr(4));
    rewards.clear();
    for (std::size_t i = 0; i < buf.size(); ++i) rewards.insert(buf.at(i).reward);
    CHECK(rewards == std::set<double>{2.0, 3.0, 4.0});
}

TEST_CASE("dimension mismatch is rejected") {
    ReplayBuffer buf(4, 2, 1);
    Transition bad{{1.0}, {1.0}, 0.0, {1.0, 2.0}, Termination::none};
    CHECK_THROWS_AS(buf.push(bad), ShapeError);
}

TEST_CASE("last terminal tracks true terminals only") {
    ReplayBuffer buf(8, 1, 1);
    CHECK(!buf.last_terminal().has_value());
    buf.push(make_tr(1));
    CHECK(!buf.last_terminal().has_value());
    buf.push(make_tr(2, Termination::true_terminal));
    REQUIRE(buf.last_terminal().has_value());
    CHECK(buf.last_terminal()->reward == 2.0);
    buf.push(make_tr(3, Termination::time_limit));
    CHECK(buf.last_terminal()->reward == 2.0); // cutoff does not replace it
    buf.push(make_tr(4, Termination::true_terminal));
    CHECK(buf.last_terminal()->reward == 4.0);
}

TEST_CASE("sampling from a single-item buffer repeats that item") {
    ReplayBuffer buf(4, 1, 1);
    buf.push(make_tr(9));
    Rng rng(3);
    const auto batch = buf.sample_uniform(5, rng);
    CHECK(batch.size() == 5);
    for (const auto& t : batch) CHECK(t.reward == 9.0);
}

TEST_CASE("sampling an empty buffer throws") {
    ReplayBuffer buf(4, 1, 1);
    Rng rng(3);
    CHECK_THROWS(buf.sample_uniform(1, rng));
}

TEST_CASE("sampling is deterministic per generator state") {
    ReplayBuffer buf(16, 1, 1);
    for (int i = 0; i < 10; ++i) buf.push(make_tr(i));
    Rng a(77), b(77);
    const auto s1 = buf.sample_indices(32, a);
    const auto s2 = buf.sample_indices(32, b);
    CHECK(s1 == s2);
}

TEST_CASE("sampling is uniform within chi-square tolerance") {
    ReplayBuffer buf(16, 1, 1);
    for (int i = 0; i < 10; ++i) buf.push(make_tr(i));
    Rng rng(2024);
    std::vector<int> counts(10, 0);
    const int draws = 100000;
    for (std::size_t i : buf.sample_indices(draws, rng)) counts[i] += 1;
    const double expected = draws / 10.0;
    const double sigma = std::sqrt(draws * 0.1 * 0.9);
    for (int c : counts) CHECK(std::abs(c - expected) < 4.0 * sigma);
}

TEST_CASE("sampling never returns an evicted slot") {
    ReplayBuffer buf(8, 1, 1);
    for (int i = 0; i < 29; ++i) buf.push(make_tr(i)); // window is now 21..28
    Rng rng(5);
    for (const auto& t : buf.sample_uniform(500, rng)) {
        CHECK(t.reward >= 21.0);
        CHECK(t.reward <= 28.0);
    }
}

TEST_CASE("stored transitions are not mutated by sampling") {
    ReplayBuffer buf(4, 1, 1);
    buf.push(make_tr(1));
    buf.push(make_tr(2));
    Rng rng(6);
    auto batch = buf.sample_uniform(8, rng);
    for (auto& t : batch) t.reward = -100.0; // copies only
    CHECK(buf.at(0).reward == 1.0);
    CHECK(buf.at(1).reward == 2.0);
}
