#include "fairrag/stats.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fairrag {
namespace {

// Continued fraction for the regularized incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-30;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            break;
        }
    }
    return h;
}

void require_supported_alpha(double alpha_level) {
    if (alpha_level != 0.01 && alpha_level != 0.05) {
        throw UnsupportedAlphaError("unsupported alpha level " + std::to_string(alpha_level) +
                                    " (supported: 0.01, 0.05)");
    }
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) {
        return 0.0;
    }
    if (x >= 1.0) {
        return 1.0;
    }
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    const double x = df / (df + t * t);
    const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double critical_t(std::size_t df, double alpha_level) {
    if (df < 1) {
        throw StatsError("critical_t: df must be >= 1");
    }
    require_supported_alpha(alpha_level);
    const double target = 1.0 - alpha_level / 2.0;
    const double dff = static_cast<double>(df);

    double hi = 1.0;
    while (student_t_cdf(hi, dff) < target) {
        hi *= 2.0;
        if (hi > 1e9) {
            throw StatsError("critical_t: inversion failed to bracket");
        }
    }
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, dff) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SummaryStats summarize(std::span<const double> samples, double z_threshold) {
    if (samples.size() < 2) {
        throw TooFewSamplesError("summarize: need at least 2 samples, got " +
                                 std::to_string(samples.size()));
    }
    SummaryStats stats;
    stats.n = samples.size();
    double sum = 0.0;
    for (double x : samples) {
        sum += x;
    }
    stats.mean = sum / static_cast<double>(stats.n);

    double ss = 0.0;
    for (double x : samples) {
        const double d = x - stats.mean;
        ss += d * d;
    }
    stats.std_dev = std::sqrt(ss / static_cast<double>(stats.n - 1));

    if (stats.std_dev > 0.0) {
        for (double x : samples) {
            if (std::abs((x - stats.mean) / stats.std_dev) > z_threshold) {
                ++stats.outlier_count;
            }
        }
    }
    return stats;
}

TTestResult t_test(const SummaryStats& a, const SummaryStats& b, double alpha_level) {
    if (a.n != b.n) {
        throw UnequalNError("t_test: group sizes differ (" + std::to_string(a.n) + " vs " +
                            std::to_string(b.n) + ")");
    }
    if (a.n < 2) {
        throw TooFewSamplesError("t_test: need n >= 2 per group");
    }
    if (a.std_dev == 0.0 && b.std_dev == 0.0) {
        throw DegenerateVarianceError("t_test: both groups have zero variance");
    }
    require_supported_alpha(alpha_level);

    TTestResult result;
    const double n = static_cast<double>(a.n);
    const double se = std::sqrt((a.std_dev * a.std_dev + b.std_dev * b.std_dev) / n);
    result.t_value = (a.mean - b.mean) / se;
    result.df = 2 * a.n - 2;
    result.critical_t = critical_t(result.df, alpha_level);
    result.significant = std::abs(result.t_value) > result.critical_t;
    return result;
}

}  // namespace fairrag
