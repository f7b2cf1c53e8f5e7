#include <doctest.h>

#include <cmath>

#include "awd3/bias_stats.hpp"
#include "awd3/errors.hpp"

using namespace awd3;

namespace {
constexpr double kPi = 3.141592653589793;

GaussianErrorModel random_model(Rng& rng) {
    GaussianErrorModel m;
    m.mu1 = rng.uniform(-2, 2);
    m.mu2 = rng.uniform(-2, 2);
    m.sigma1 = rng.uniform(0.2, 2.5);
    m.sigma2 = rng.uniform(0.2, 2.5);
    m.rho = rng.uniform(-0.95, 0.95);
    return m;
}
} // namespace

TEST_CASE("expected_min matches the iid zero-mean closed form") {
    for (double sigma : {0.1, 1.0, 10.0}) {
        GaussianErrorModel m{0.0, 0.0, sigma, sigma, 0.0};
        CHECK(expected_min(m) == doctest::Approx(-sigma / std::sqrt(kPi)).epsilon(1e-12));
    }
}

TEST_CASE("expected_min of two identical variables is their mean") {
    GaussianErrorModel m{0.7, 0.7, 1.3, 1.3, 1.0};
    CHECK(m.sigma_diff() == 0.0);
    CHECK(expected_min(m) == 0.7);

    GaussianErrorModel shifted{-0.4, 0.9, 1.3, 1.3, 1.0};
    CHECK(expected_min(shifted) == -0.4); // same variable plus a constant
}

TEST_CASE("model validation rejects out-of-domain parameters") {
    CHECK_THROWS_AS(expected_min({0, 0, -1.0, 1.0, 0.0}), ParameterDomainError);
    CHECK_THROWS_AS(expected_min({0, 0, 0.0, 1.0, 0.0}), ParameterDomainError);
    CHECK_THROWS_AS(expected_min({0, 0, 1.0, 1.0, 1.5}), ParameterDomainError);
    CHECK_THROWS_AS(mc_min_oracle({0, 0, 1.0, -2.0, 0.0}, 10, 1), ParameterDomainError);
}

TEST_CASE("closed form agrees with the sampling oracle on an asymmetric model") {
    GaussianErrorModel m{0.3, -0.2, 1.0, 0.5, 0.4};
    const auto mc = mc_min_oracle(m, 10000000, 42);
    CHECK(std::abs(expected_min(m) - mc.mean) <= 3.0 * mc.std_error);
}

TEST_CASE("closed form agrees with the sampling oracle over a parameter grid") {
    std::uint64_t seed = 900;
    for (double mu : {-1.0, 0.0, 1.0})
        for (double sigma : {0.5, 1.0, 2.0})
            for (double rho : {-0.5, 0.0, 0.9}) {
                GaussianErrorModel m{mu, mu, sigma, sigma, rho};
                const auto mc = mc_min_oracle(m, 200000, seed++);
                CAPTURE(mu);
                CAPTURE(sigma);
                CAPTURE(rho);
                CHECK(std::abs(expected_min(m) - mc.mean) <= 3.0 * mc.std_error);
            }
}

TEST_CASE("expected_min is dominated by both the min of means and the average") {
    Rng rng(7);
    for (int k = 0; k < 1000; ++k) {
        const GaussianErrorModel m = random_model(rng);
        const double em = expected_min(m);
        CHECK(em <= std::min(m.mu1, m.mu2) + 1e-12);
        CHECK(em <= 0.5 * (m.mu1 + m.mu2) + 1e-12);
    }
}

TEST_CASE("expected_min is symmetric under swapping the two estimators") {
    Rng rng(8);
    for (int k = 0; k < 1000; ++k) {
        const GaussianErrorModel m = random_model(rng);
        const GaussianErrorModel swapped{m.mu2, m.mu1, m.sigma2, m.sigma1, m.rho};
        CHECK(expected_min(m) == doctest::Approx(expected_min(swapped)).epsilon(1e-12));
    }
}

TEST_CASE("expected_min translates with a common shift of the means") {
    Rng rng(9);
    for (int k = 0; k < 1000; ++k) {
        GaussianErrorModel m = random_model(rng);
        const double base = expected_min(m);
        const double c = rng.uniform(-3, 3);
        m.mu1 += c;
        m.mu2 += c;
        CHECK(expected_min(m) == doctest::Approx(base + c).epsilon(1e-11));
    }
}

TEST_CASE("expected_weighted_bias interpolates between average and min") {
    Rng rng(10);
    for (int k = 0; k < 100; ++k) {
        const GaussianErrorModel m = random_model(rng);
        CHECK(expected_weighted_bias(m, 0.0) ==
              doctest::Approx(0.5 * (m.mu1 + m.mu2)).epsilon(1e-12));
        CHECK(expected_weighted_bias(m, 1.0) ==
              doctest::Approx(expected_min(m)).epsilon(1e-12));
    }
}

TEST_CASE("optimal_beta zeroes the expected bias when the means coincide") {
    GaussianErrorModel m{0.5, 0.5, 1.0, 1.0, 0.0};
    const double beta = optimal_beta(m);
    // sqrt(2*pi)/sqrt(2) * 0.5 = sqrt(pi)/2
    CHECK(beta == doctest::Approx(std::sqrt(kPi) / 2.0).epsilon(1e-12));
    CHECK(std::abs(expected_weighted_bias(m, beta)) < 1e-12);

    Rng rng(11);
    for (int k = 0; k < 1000; ++k) {
        GaussianErrorModel r = random_model(rng);
        r.mu2 = r.mu1;
        CHECK(std::abs(expected_weighted_bias(r, optimal_beta(r))) < 1e-10);
    }
}

TEST_CASE("optimal_beta special values") {
    CHECK(optimal_beta({0.0, 0.0, 1.0, 1.0, 0.0}) == 0.0); // unbiased estimators

    // Invert the weighting formula for beta == 1: means s/sqrt(2*pi) with
    // sigma_diff == s.
    const double s = 1.7;
    const double mu = s / std::sqrt(2.0 * kPi);
    GaussianErrorModel m{mu, mu, s / std::sqrt(2.0), s / std::sqrt(2.0), 0.0};
    CHECK(m.sigma_diff() == doctest::Approx(s).epsilon(1e-12));
    CHECK(optimal_beta(m) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(optimal_beta({0.5, 0.5, 1.0, 1.0, 1.0}), DegenerateModelError);
}

TEST_CASE("sampling oracle is deterministic per seed") {
    GaussianErrorModel m{0.1, -0.3, 0.8, 1.2, 0.25};
    const auto a = mc_min_oracle(m, 50000, 1234);
    const auto b = mc_min_oracle(m, 50000, 1234);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    const auto c = mc_min_oracle(m, 50000, 1235);
    CHECK(a.mean != c.mean);
}

TEST_CASE("sampling oracle with fully correlated equal deviations") {
    // The pair coincides sample by sample, so the minimum is the variable
    // itself and its mean concentrates on mu at rate sigma/sqrt(n).
    GaussianErrorModel m{0.9, 0.9, 0.6, 0.6, 1.0};
    const std::uint64_t n = 400000;
    const auto mc = mc_min_oracle(m, n, 5);
    CHECK(std::abs(mc.mean - 0.9) <= 4.0 * 0.6 / std::sqrt(static_cast<double>(n)));
    CHECK(mc.std_error == doctest::Approx(0.6 / std::sqrt(static_cast<double>(n))).epsilon(0.02));
}
