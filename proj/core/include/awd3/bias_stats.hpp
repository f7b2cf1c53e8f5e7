#pragma once

#include <cstdint>

#include "awd3/rng.hpp"

namespace awd3 {

/// Error distributions of a pair of value estimators: estimator i deviates
/// from the true value by a Gaussian with mean mu_i and deviation sigma_i,
/// and the two deviations have correlation rho.
struct GaussianErrorModel {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double rho = 0.0;

    /// Deviation of the difference of the two errors,
    /// sqrt(sigma1^2 + sigma2^2 - 2*rho*sigma1*sigma2).
    /// Zero exactly when the two errors are the same variable up to a shift.
    double sigma_diff() const;

    /// Throws ParameterDomainError unless sigma1, sigma2 > 0 and |rho| <= 1.
    void validate() const;
};

/// Expected value of min of the two correlated Gaussian errors.
/// Degenerate case sigma_diff == 0 returns min(mu1, mu2).
double expected_min(const GaussianErrorModel& model);

/// Expected bias of the combination beta*min + (1-beta)/2*(D1+D2):
/// beta*expected_min(model) + (1-beta)*(mu1+mu2)/2.
double expected_weighted_bias(const GaussianErrorModel& model, double beta);

/// Weight that zeroes the expected combination bias when mu1 ~= mu2:
/// sqrt(2*pi)/sigma_diff * (mu1+mu2)/2. Unclamped; may exceed 1.
/// Throws DegenerateModelError when sigma_diff == 0.
double optimal_beta(const GaussianErrorModel& model);

struct McMinEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of E[min(D1, D2)]: draws n_samples correlated pairs
/// via the Cholesky factor of the 2x2 covariance and averages the minima.
/// Deterministic given the seed. Independent check on expected_min.
McMinEstimate mc_min_oracle(const GaussianErrorModel& model,
                            std::uint64_t n_samples, std::uint64_t seed);

/// Standard normal CDF / PDF used by the closed form above.
double norm_cdf(double x);
double norm_pdf(double x);

} // namespace awd3
