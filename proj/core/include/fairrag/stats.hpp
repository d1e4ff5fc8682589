#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace fairrag {

struct StatsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooFewSamplesError : StatsError {
    using StatsError::StatsError;
};
struct UnequalNError : StatsError {
    using StatsError::StatsError;
};
struct DegenerateVarianceError : StatsError {
    using StatsError::StatsError;
};
struct UnsupportedAlphaError : StatsError {
    using StatsError::StatsError;
};

struct SummaryStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;  // sample (Bessel-corrected)
    std::size_t outlier_count = 0;
};

struct TTestResult {
    double t_value = 0.0;
    std::size_t df = 0;
    double critical_t = 0.0;
    bool significant = false;  // |t| > critical_t
};

/// Mean, Bessel-corrected sample standard deviation, and the count of samples
/// with |z| > z_threshold. Requires n >= 2.
SummaryStats summarize(std::span<const double> samples, double z_threshold = 3.0);

/// Two-tailed Student-t critical value via numeric inversion of the
/// incomplete-beta CDF. Supported alpha levels: 0.01 and 0.05.
double critical_t(std::size_t df, double alpha_level);

/// Independent two-sample t-test for the equal-n design:
/// t = (a.mean - b.mean) / sqrt((a.std^2 + b.std^2) / n), df = 2n - 2.
/// For n1 = n2 this coincides numerically with both the pooled Student and
/// Welch formulations.
TTestResult t_test(const SummaryStats& a, const SummaryStats& b, double alpha_level);

/// Regularized incomplete beta I_x(a, b); exposed for testing.
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `df` degrees of freedom; exposed for testing.
double student_t_cdf(double t, double df);

}  // namespace fairrag
