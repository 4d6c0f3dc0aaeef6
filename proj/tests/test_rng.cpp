#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ksel/binomial.hpp"
#include "ksel/rng.hpp"

using namespace ksel;

TEST_CASE("streams are deterministic functions of their key") {
    const std::uint64_t seed_a = derive_stream_seed(42, {1, 10, 3});
    const std::uint64_t seed_b = derive_stream_seed(42, {1, 10, 3});
    const std::uint64_t seed_c = derive_stream_seed(42, {1, 10, 4});
    CHECK(seed_a == seed_b);
    CHECK(seed_a != seed_c);

    Rng rng_a(seed_a);
    Rng rng_b(seed_b);
    for (int i = 0; i < 64; ++i) {
        CHECK(rng_a.next() == rng_b.next());
    }
}

TEST_CASE("uniform_below stays in range and covers small supports") {
    Rng rng(1);
    std::vector<int> counts(5, 0);
    for (int i = 0; i < 50000; ++i) {
        const std::uint64_t draw = uniform_below(rng, 5);
        REQUIRE(draw < 5);
        ++counts[static_cast<std::size_t>(draw)];
    }
    for (int c : counts) {
        CHECK(c > 9500);  // expected 10000 each
        CHECK(c < 10500);
    }
    CHECK(uniform_below(rng, 1) == 0);
}

TEST_CASE("uniform_double lies in [0,1)") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = uniform_double(rng);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("sample_binomial trivial cases and parameter checks") {
    Rng rng(3);
    CHECK(sample_binomial(0, 0.5, rng) == 0);
    CHECK(sample_binomial(17, 1.0, rng) == 17);
    CHECK(sample_binomial(17, 0.0, rng) == 0);
    CHECK_THROWS_AS(sample_binomial(5, -0.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_binomial(5, 1.1, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_binomial(5, std::nan(""), rng), std::invalid_argument);
    for (int i = 0; i < 1000; ++i) {
        CHECK(sample_binomial(9, 0.5, rng) <= 9);
    }
}

TEST_CASE("sample_binomial handles n = 1e7 in constant time") {
    Rng rng(17);
    const std::uint64_t n = 10000000;
    double sum = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t draw = sample_binomial(n, 0.3, rng);
        REQUIRE(draw <= n);
        sum += static_cast<double>(draw);
    }
    const double sample_mean = sum / 2000.0;
    const double sigma = std::sqrt(n * 0.3 * 0.7 / 2000.0);
    CHECK(std::abs(sample_mean - 0.3 * static_cast<double>(n)) < 4.0 * sigma);
}

TEST_CASE("sample_binomial mean for tiny p and huge n") {
    // n = 1e6, p = 1e-6: mean 1.0, checked to 3 sigma of the Monte Carlo error.
    Rng rng(20260808);
    const int draws = 100000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
        sum += static_cast<double>(sample_binomial(1000000, 1e-6, rng));
    }
    const double sample_mean = sum / draws;
    const double sigma = std::sqrt(1e6 * 1e-6 * (1.0 - 1e-6) / draws);
    CHECK(std::abs(sample_mean - 1.0) < 3.0 * sigma);
}

namespace {

// Exact CDF by the PMF recurrence, evaluated in long double.
std::vector<double> exact_binomial_cdf(std::uint64_t n, double p) {
    std::vector<double> cdf(n + 1);
    long double pmf = std::pow(1.0L - static_cast<long double>(p), static_cast<long double>(n));
    long double acc = pmf;
    cdf[0] = static_cast<double>(acc);
    const long double odds = static_cast<long double>(p) / (1.0L - static_cast<long double>(p));
    for (std::uint64_t k = 1; k <= n; ++k) {
        pmf *= odds * static_cast<long double>(n - k + 1) / static_cast<long double>(k);
        acc += pmf;
        cdf[k] = static_cast<double>(acc);
    }
    return cdf;
}

// One-sample KS distance between empirical draws and the exact CDF.
double ks_against_exact(std::uint64_t n, double p, int draws, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> histogram(n + 1, 0);
    for (int i = 0; i < draws; ++i) {
        const std::uint64_t draw = sample_binomial(n, p, rng);
        REQUIRE(draw <= n);
        ++histogram[static_cast<std::size_t>(draw)];
    }
    const std::vector<double> cdf = exact_binomial_cdf(n, p);
    double d = 0.0;
    double empirical = 0.0;
    for (std::uint64_t k = 0; k <= n; ++k) {
        empirical += static_cast<double>(histogram[k]) / draws;
        d = std::max(d, std::abs(empirical - cdf[k]));
    }
    return d;
}

}  // namespace

// Both sampling regimes against the exact distribution; 0.0065 is the
// one-sample KS cutoff at significance ~1e-3 for 1e5 draws.
TEST_CASE("sample_binomial matches the exact CDF in both regimes") {
    CHECK(ks_against_exact(50, 0.1, 100000, 11) < 0.0065);    // waiting-time inversion
    CHECK(ks_against_exact(200, 0.3, 100000, 12) < 0.0065);   // BTRS rejection
    CHECK(ks_against_exact(40, 0.9, 100000, 13) < 0.0065);    // p > 1/2 flip, inversion
    CHECK(ks_against_exact(150, 0.85, 100000, 14) < 0.0065);  // p > 1/2 flip, BTRS
}
