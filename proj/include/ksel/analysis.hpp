#pragma once

#include <cstdint>

#include "ksel/rng.hpp"

namespace ksel {

/// Closed-form quantities behind the makespan guarantees of the two
/// protocols, evaluated for a concrete (delta, k).
struct AnalysisQuantities {
    double delta = 0.0;
    std::uint64_t k = 0;

    double tau = 0.0;      // round threshold 300 * delta * ln(1 + k)
    double gamma = 0.0;    // (delta-1)(3-delta)/(delta-2)
    double s_value = 0.0;  // 2 * sum_{j=0..4} (5/6)^j * tau
    double m_value = 0.0;  // dense-regime message threshold, extended precision

    // m_value recomputed in plain double; ln(delta) - 1 nearly cancels for
    // delta near e, so the double path can lose most of its digits.
    double m_value_double = 0.0;
    bool m_precision_warning = false;

    double ofa_bound = 0.0;    // 2 (delta + 1) k
    double ebobo_bound = 0.0;  // 4 (1 + 1/delta) k
};

/// Evaluates all fields. Throws std::domain_error at the singular parameters
/// delta == 2 (gamma) and ln(delta) == 1 (m_value); throws
/// std::invalid_argument for nonpositive delta or k == 0.
AnalysisQuantities compute_quantities(double delta, std::uint64_t k);

/// Probability that exactly one of kappa contenders transmits when each
/// transmits independently with probability 1/kappa_hat:
/// (kappa / kappa_hat) * (1 - 1/kappa_hat)^(kappa - 1).
/// Nondecreasing in kappa_hat below kappa and maximized at kappa_hat == kappa.
double success_probability(std::uint64_t kappa, double kappa_hat);

/// Drops m balls into w bins uniformly at random and returns the number of
/// bins holding exactly one ball. One contention window with m remaining
/// nodes and w slots is exactly this process.
std::uint64_t balls_in_bins_singletons(std::uint64_t m, std::uint64_t w, Rng& rng);

/// Monte Carlo estimate of P(singletons < delta * m) over the given number
/// of samples. Requires 0 < delta < 1/e and m <= w.
double singleton_tail_estimate(std::uint64_t m, std::uint64_t w, double delta,
                            std::uint64_t samples, Rng& rng);

}  // namespace ksel
