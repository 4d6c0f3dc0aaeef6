#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ksel/analysis.hpp"
#include "ksel/rng.hpp"

using namespace ksel;

TEST_CASE("compute_quantities at delta = 2.72, k = 100") {
    const AnalysisQuantities q = compute_quantities(2.72, 100);

    // gamma = (1.72 * 0.28) / 0.72 = 301/450, cross-checked as a rational.
    CHECK(q.gamma == doctest::Approx(301.0 / 450.0).epsilon(1e-12));
    CHECK(q.gamma == doctest::Approx(0.6688888888888889).epsilon(1e-12));

    // tau = 816 ln(101).
    CHECK(q.tau == doctest::Approx(300.0 * 2.72 * std::log(101.0)).epsilon(1e-12));
    CHECK(q.tau == doctest::Approx(3765.9383).epsilon(1e-6));

    // s = 2 tau sum_{j=0..4} (5/6)^j.
    const double geo = 1.0 + 5.0 / 6.0 + 25.0 / 36.0 + 125.0 / 216.0 + 625.0 / 1296.0;
    CHECK(q.s_value == doctest::Approx(2.0 * geo * q.tau).epsilon(1e-12));

    CHECK(q.ofa_bound == doctest::Approx(7.44 * 100.0).epsilon(1e-12));
    CHECK(q.ebobo_bound / 100.0 == doctest::Approx(4.0 * (1.0 + 1.0 / 2.72)).epsilon(1e-12));

    // ln(2.72) - 1 ~ 6.3e-4, still fine in double: no divergence warning here.
    CHECK(q.m_value == doctest::Approx(q.m_value_double).epsilon(1e-10));
    CHECK_FALSE(q.m_precision_warning);
    CHECK(q.m_value > 0.0);
}

TEST_CASE("bound ratios for the evaluation parameters") {
    const AnalysisQuantities ofa = compute_quantities(2.72, 1000);
    CHECK(ofa.ofa_bound / 1000.0 == doctest::Approx(7.44).epsilon(1e-12));

    const AnalysisQuantities ebobo = compute_quantities(0.366, 1000);
    CHECK(ebobo.ebobo_bound / 1000.0 == doctest::Approx(14.92896174863388).epsilon(1e-12));
}

TEST_CASE("singular parameters are explicit errors") {
    CHECK_THROWS_AS(compute_quantities(2.0, 10), std::domain_error);
    CHECK_THROWS_AS(compute_quantities(std::numbers::e, 10), std::domain_error);
    CHECK_THROWS_AS(compute_quantities(0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(compute_quantities(2.72, 0), std::invalid_argument);
}

TEST_CASE("quantities vary smoothly near delta = 2.72") {
    const AnalysisQuantities base = compute_quantities(2.72, 100);
    const AnalysisQuantities nudged = compute_quantities(2.72 + 1e-9, 100);
    CHECK(std::abs(nudged.tau - base.tau) / base.tau < 1e-8);
    CHECK(std::abs(nudged.gamma - base.gamma) / base.gamma < 1e-7);
    // m_value's relative sensitivity is ~1/(ln(delta) - 1) ~ 1.6e3, so a 1e-9
    // nudge moves it by about 6e-7 relative.
    CHECK(std::abs(nudged.m_value - base.m_value) / base.m_value < 1e-5);
}

TEST_CASE("m_value precision warning fires close to the ln(delta) = 1 pole") {
    // ln(delta) - 1 ~ 2e-10 here; the double evaluation loses most digits.
    const AnalysisQuantities q = compute_quantities(2.718281829, 100);
    CHECK(q.m_precision_warning);
}

TEST_CASE("success_probability formula and edge cases") {
    CHECK(success_probability(1, 7.5) == doctest::Approx(1.0 / 7.5).epsilon(1e-12));
    CHECK(success_probability(2, 2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(success_probability(100, 100.0) ==
          doctest::Approx(std::pow(0.99, 99.0)).epsilon(1e-12));
    CHECK(success_probability(100, 100.0) == doctest::Approx(0.3697).epsilon(1e-3));
    CHECK_THROWS_AS(success_probability(0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(success_probability(5, 1.0), std::invalid_argument);
}

// (a/x)(1 - 1/x)^(a-1) is nondecreasing below x = a and peaks there.
TEST_CASE("success_probability is nondecreasing below kappa and peaks at kappa") {
    for (std::uint64_t kappa = 2; kappa <= 1000; ++kappa) {
        const double peak = success_probability(kappa, static_cast<double>(kappa));
        double previous = 0.0;
        const int grid = 200;
        for (int i = 1; i <= grid; ++i) {
            const double kappa_hat =
                1.0 + (2.0 * static_cast<double>(kappa) - 1.0) * i / grid;
            const double value = success_probability(kappa, kappa_hat);
            REQUIRE(value <= peak * (1.0 + 1e-12));
            if (kappa_hat < static_cast<double>(kappa)) {
                REQUIRE(value >= previous - 1e-15);
                previous = value;
            }
        }
    }
}

// e^(x/(1+x)) <= 1+x <= e^x on (0,1); guards the exponential comparisons the
// bound calculators lean on.
TEST_CASE("exponential sandwich inequality on (0,1)") {
    Rng rng(31337);
    for (int i = 0; i < 10000; ++i) {
        const double x = uniform_double(rng);
        if (x == 0.0) continue;
        CHECK(std::exp(x / (1.0 + x)) <= 1.0 + x + 1e-15);
        CHECK(1.0 + x <= std::exp(x) + 1e-15);
    }
}

TEST_CASE("balls_in_bins_singletons exact small cases") {
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        CHECK(balls_in_bins_singletons(1, 5, rng) == 1);  // a lone ball is always alone
        CHECK(balls_in_bins_singletons(2, 1, rng) == 0);  // two balls, one bin: collision
    }
    CHECK_THROWS_AS(balls_in_bins_singletons(0, 5, rng), std::invalid_argument);
    CHECK_THROWS_AS(balls_in_bins_singletons(5, 0, rng), std::invalid_argument);
}

TEST_CASE("balls_in_bins_singletons mean matches m(1-1/w)^(m-1)") {
    Rng rng(20260807);
    const int samples = 100000;
    const double expected = 16.0 * std::pow(15.0 / 16.0, 15.0);  // ~6.0776
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
        const auto singles = static_cast<double>(balls_in_bins_singletons(16, 16, rng));
        sum += singles;
        sum_sq += singles * singles;
    }
    const double sample_mean = sum / samples;
    const double variance = (sum_sq - sum * sum / samples) / (samples - 1);
    const double standard_error = std::sqrt(variance / samples);
    CHECK(std::abs(sample_mean - expected) < 3.0 * standard_error);
}

TEST_CASE("singleton_tail_estimate brute-force cases") {
    Rng rng(606);
    // One ball in one bin: always exactly one singleton, never below 0.3.
    CHECK(singleton_tail_estimate(1, 1, 0.3, 2000, rng) == 0.0);

    // Two balls in two bins: singletons are 0 or 2, each with probability 1/2
    // over the four equally likely assignments; 0 < 0.6 counts, 2 does not.
    const double estimate = singleton_tail_estimate(2, 2, 0.3, 10000, rng);
    CHECK(estimate == doctest::Approx(0.5).epsilon(0.035));

    CHECK_THROWS_AS(singleton_tail_estimate(4, 2, 0.3, 100, rng), std::invalid_argument);
    CHECK_THROWS_AS(singleton_tail_estimate(2, 4, 0.5, 100, rng), std::invalid_argument);
    CHECK_THROWS_AS(singleton_tail_estimate(2, 4, 0.3, 0, rng), std::invalid_argument);
}

// At m = w = 1000 the singleton count concentrates around 368 with a standard
// deviation near 15, so the 0.366m = 366 cutoff sits barely below the center
// of the distribution and is undershot in roughly four samples out of ten.
TEST_CASE("singleton_tail_estimate at m = w = 1000, delta = 0.366") {
    Rng rng(1234);
    const double estimate = singleton_tail_estimate(1000, 1000, 0.366, 4000, rng);
    CHECK(estimate > 0.30);
    CHECK(estimate < 0.60);
}
