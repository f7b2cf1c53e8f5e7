#include "awd3/bias_stats.hpp"

#include <algorithm>
#include <cmath>

#include "awd3/errors.hpp"

namespace awd3 {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kSqrt2Pi = 2.5066282746310002;
} // namespace

double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double norm_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

void GaussianErrorModel::validate() const {
    if (!(sigma1 > 0.0) || !(sigma2 > 0.0))
        throw ParameterDomainError("GaussianErrorModel: sigma1 and sigma2 must be > 0");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw ParameterDomainError("GaussianErrorModel: rho must lie in [-1, 1]");
}

double GaussianErrorModel::sigma_diff() const {
    const double var = sigma1 * sigma1 + sigma2 * sigma2 - 2.0 * rho * sigma1 * sigma2;
    return std::sqrt(std::max(0.0, var));
}

double expected_min(const GaussianErrorModel& model) {
    model.validate();
    const double sd = model.sigma_diff();
    if (sd == 0.0) {
        // The two errors are the same variable shifted by a constant.
        return std::min(model.mu1, model.mu2);
    }
    const double gap = (model.mu1 - model.mu2) / sd;
    return model.mu1 * norm_cdf(-gap) + model.mu2 * norm_cdf(gap) - sd * norm_pdf(gap);
}

double expected_weighted_bias(const GaussianErrorModel& model, double beta) {
    const double avg = 0.5 * (model.mu1 + model.mu2);
    return beta * expected_min(model) + (1.0 - beta) * avg;
}

double optimal_beta(const GaussianErrorModel& model) {
    model.validate();
    const double sd = model.sigma_diff();
    if (sd == 0.0)
        throw DegenerateModelError(
            "optimal_beta: sigma_diff is 0; no finite weight zeroes the bias");
    return kSqrt2Pi / sd * 0.5 * (model.mu1 + model.mu2);
}

McMinEstimate mc_min_oracle(const GaussianErrorModel& model,
                            std::uint64_t n_samples, std::uint64_t seed) {
    model.validate();
    if (n_samples < 1)
        throw ParameterDomainError("mc_min_oracle: n_samples must be >= 1");

    // Cholesky factor of [[s1^2, rho*s1*s2], [rho*s1*s2, s2^2]].
    const double l11 = model.sigma1;
    const double l21 = model.rho * model.sigma2;
    const double l22 = model.sigma2 * std::sqrt(std::max(0.0, 1.0 - model.rho * model.rho));

    // Accumulate around the midpoint of the means to keep the sums well
    // conditioned at large sample counts.
    const double center = 0.5 * (model.mu1 + model.mu2);
    Rng rng(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const auto z = rng.normal_pair();
        const double d1 = model.mu1 + l11 * z[0];
        const double d2 = model.mu2 + l21 * z[0] + l22 * z[1];
        const double m = std::min(d1, d2) - center;
        sum += m;
        sum_sq += m * m;
    }
    const double n = static_cast<double>(n_samples);
    const double mean_c = sum / n;
    McMinEstimate out;
    out.mean = center + mean_c;
    if (n_samples > 1) {
        const double var = std::max(0.0, (sum_sq - n * mean_c * mean_c) / (n - 1.0));
        out.std_error = std::sqrt(var / n);
    }
    return out;
}

} // namespace awd3
