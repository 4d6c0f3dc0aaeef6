#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ksel {

inline double mean(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    return sum / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 points.
inline double sample_std_dev(std::span<const double> xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean(xs);
    double sum_sq = 0.0;
    for (double x : xs) {
        const double d = x - m;
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / static_cast<double>(xs.size() - 1));
}

struct KsTest {
    double statistic = 0.0;       // sup |F_a - F_b|
    double critical_value = 0.0;  // rejection threshold at the given level
    bool reject = false;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic critical value
/// c(alpha) * sqrt((n+m)/(n*m)), c(alpha) = sqrt(-ln(alpha/2)/2). With tied
/// (integer-valued) samples the test is conservative.
inline KsTest ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto n = static_cast<double>(a.size());
    const auto m = static_cast<double>(b.size());

    std::vector<double> values;
    values.reserve(a.size() + b.size());
    values.insert(values.end(), a.begin(), a.end());
    values.insert(values.end(), b.begin(), b.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    double d = 0.0;
    for (double v : values) {
        const auto fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), v) - a.begin()) / n;
        const auto fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), v) - b.begin()) / m;
        d = std::max(d, std::abs(fa - fb));
    }

    KsTest result;
    result.statistic = d;
    result.critical_value = std::sqrt(-std::log(alpha / 2.0) / 2.0) * std::sqrt((n + m) / (n * m));
    result.reject = d > result.critical_value;
    return result;
}

}  // namespace ksel
