#include "ksel/analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ksel/protocol.hpp"

namespace ksel {

namespace {

// sum_{j=0..4} (5/6)^j = 4651/1296.
constexpr double kGeometricSum5 = 4651.0 / 1296.0;

template <typename Real>
Real m_threshold(Real delta, Real tau, Real gamma, Real s_value) {
    const Real log_delta = std::log(delta);
    const Real denom = log_delta - Real(1);
    const Real first = ((delta + Real(1)) * log_delta - Real(1)) / denom;
    const Real second = ((gamma + Real(2) * tau + Real(1)) * log_delta - Real(1)) / denom;
    return first * s_value + second;
}

}  // namespace

AnalysisQuantities compute_quantities(double delta, std::uint64_t k) {
    if (!(delta > 0.0)) {
        throw std::invalid_argument("compute_quantities: delta must be positive");
    }
    if (k == 0) {
        throw std::invalid_argument("compute_quantities: k must be >= 1");
    }
    if (delta == 2.0) {
        throw std::domain_error("compute_quantities: gamma is singular at delta = 2");
    }
    if (std::log(delta) == 1.0) {
        throw std::domain_error("compute_quantities: m_value is singular at ln(delta) = 1");
    }

    AnalysisQuantities q;
    q.delta = delta;
    q.k = k;
    q.tau = 300.0 * delta * std::log1p(static_cast<double>(k));
    q.gamma = (delta - 1.0) * (3.0 - delta) / (delta - 2.0);
    q.s_value = 2.0 * kGeometricSum5 * q.tau;
    q.ofa_bound = 2.0 * (delta + 1.0) * static_cast<double>(k);
    q.ebobo_bound = 4.0 * (1.0 + 1.0 / delta) * static_cast<double>(k);

    // ln(delta) - 1 is ~6e-4 at delta = 2.72 and shrinks toward 0 as delta
    // approaches e, so m_value is evaluated in extended precision and the
    // plain-double result is reported alongside with a divergence flag.
    const auto tau_l = static_cast<long double>(300.0) * delta *
                       std::log1p(static_cast<long double>(k));
    const long double gamma_l = (static_cast<long double>(delta) - 1.0L) *
                                (3.0L - static_cast<long double>(delta)) /
                                (static_cast<long double>(delta) - 2.0L);
    const long double s_l = 2.0L * static_cast<long double>(kGeometricSum5) * tau_l;
    const long double m_l = m_threshold<long double>(delta, tau_l, gamma_l, s_l);
    q.m_value = static_cast<double>(m_l);
    q.m_value_double = m_threshold<double>(delta, q.tau, q.gamma, q.s_value);
    if (std::isfinite(q.m_value) && m_l != 0.0L) {
        const long double divergence = std::abs((static_cast<long double>(q.m_value_double) - m_l) / m_l);
        q.m_precision_warning = divergence > 1e-9L;
    } else {
        q.m_precision_warning = true;
    }

    if (!std::isfinite(q.tau) || !std::isfinite(q.gamma) || !std::isfinite(q.s_value) ||
        !std::isfinite(q.m_value) || !std::isfinite(q.ofa_bound) || !std::isfinite(q.ebobo_bound)) {
        throw std::domain_error("compute_quantities: non-finite result");
    }
    return q;
}

double success_probability(std::uint64_t kappa, double kappa_hat) {
    if (kappa < 1) {
        throw std::invalid_argument("success_probability: kappa must be >= 1");
    }
    if (!(kappa_hat > 1.0)) {
        throw std::invalid_argument("success_probability: kappa_hat must be > 1");
    }
    const double k = static_cast<double>(kappa);
    return (k / kappa_hat) * std::pow(1.0 - 1.0 / kappa_hat, k - 1.0);
}

std::uint64_t balls_in_bins_singletons(std::uint64_t m, std::uint64_t w, Rng& rng) {
    if (m == 0 || w == 0) {
        throw std::invalid_argument("balls_in_bins_singletons: m and w must be >= 1");
    }
    std::vector<std::uint32_t> load(w, 0);
    for (std::uint64_t ball = 0; ball < m; ++ball) {
        ++load[uniform_below(rng, w)];
    }
    std::uint64_t singletons = 0;
    for (std::uint32_t occupancy : load) {
        singletons += (occupancy == 1);
    }
    return singletons;
}

double singleton_tail_estimate(std::uint64_t m, std::uint64_t w, double delta,
                            std::uint64_t samples, Rng& rng) {
    if (!(delta > 0.0 && delta < kEboboDeltaMax)) {
        throw std::invalid_argument("singleton_tail_estimate: delta must lie in (0, 1/e)");
    }
    if (m > w) {
        throw std::invalid_argument("singleton_tail_estimate: requires m <= w");
    }
    if (samples == 0) {
        throw std::invalid_argument("singleton_tail_estimate: samples must be >= 1");
    }
    const double threshold = delta * static_cast<double>(m);
    std::uint64_t below = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        const auto singletons = static_cast<double>(balls_in_bins_singletons(m, w, rng));
        below += (singletons < threshold);
    }
    return static_cast<double>(below) / static_cast<double>(samples);
}

}  // namespace ksel
