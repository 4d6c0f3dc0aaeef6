#include "ksel/binomial.hpp"

#include <cmath>
#include <stdexcept>

namespace ksel {

namespace {

// Sums Geometric(p) waiting times until they overshoot n; the number of
// complete waits is Binomial(n, p). Expected cost O(n p + 1), so only used
// in the small-mean regime.
std::uint64_t sample_by_inversion(std::uint64_t n, double p, Rng& rng) {
    const double log_q = std::log1p(-p);
    const double count = static_cast<double>(n);
    double position = 0.0;
    std::uint64_t successes = 0;
    for (;;) {
        const double u = 1.0 - uniform_double(rng);  // (0, 1]
        position += std::floor(std::log(u) / log_q) + 1.0;
        if (position > count) {
            return successes;
        }
        ++successes;
    }
}

// stirling_tail(k) = ln k! - (k ln k - k + 0.5 ln(2 pi k)).
double stirling_tail(double k) {
    static constexpr double kTable[] = {
        0.08106146679532726, 0.04134069595540929, 0.02767792568499834, 0.02079067210376509,
        0.01664469118982119, 0.01387612882307075, 0.01189670994589177, 0.01041126526197209,
        0.009255462182712733, 0.008330563433362871};
    if (k <= 9.0) {
        return kTable[static_cast<int>(k)];
    }
    const double kp1sq = (k + 1.0) * (k + 1.0);
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / kp1sq) / kp1sq) / (k + 1.0);
}

// Hormann's BTRS transformed-rejection sampler. Requires p <= 0.5 and
// n * p >= 10; O(1) expected draws per sample.
std::uint64_t sample_by_btrs(std::uint64_t n, double p, Rng& rng) {
    const double count = static_cast<double>(n);
    const double spq = std::sqrt(count * p * (1.0 - p));
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = count * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double odds = p / (1.0 - p);
    const double m = std::floor((count + 1.0) * p);

    for (;;) {
        const double u = uniform_double(rng) - 0.5;
        double v = uniform_double(rng);
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + c);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || k > count) {
            continue;
        }
        // Transformed-rejection acceptance test in log space.
        v = std::log(v * alpha / (a / (us * us) + b));
        const double bound = (m + 0.5) * std::log((m + 1.0) / (odds * (count - m + 1.0))) +
                             (count + 1.0) * std::log((count - m + 1.0) / (count - k + 1.0)) +
                             (k + 0.5) * std::log(odds * (count - k + 1.0) / (k + 1.0)) +
                             stirling_tail(m) + stirling_tail(count - m) - stirling_tail(k) -
                             stirling_tail(count - k);
        if (v <= bound) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

}  // namespace

std::uint64_t sample_binomial(std::uint64_t n, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("sample_binomial: p must lie in [0, 1]");
    }
    if (n == 0 || p == 0.0) {
        return 0;
    }
    if (p == 1.0) {
        return n;
    }
    const double q = std::min(p, 1.0 - p);
    const std::uint64_t draw = (static_cast<double>(n) * q >= 10.0) ? sample_by_btrs(n, q, rng)
                                                                    : sample_by_inversion(n, q, rng);
    return p > 0.5 ? n - draw : draw;
}

}  // namespace ksel
