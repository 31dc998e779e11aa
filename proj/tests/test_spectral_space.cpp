#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "seelab/errors.hpp"
#include "seelab/spectral_space.hpp"

using namespace seelab;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

Eigenstructure heat() { return Eigenstructure::power_law(kPi2, 2.0); }

// Brute-force series at 50 digits with a fixed number of terms.
double calE_series(double r, double x, int terms) {
    using Big = boost::multiprecision::cpp_bin_float_50;
    Big sum = 0;
    const Big lb = 2 * log(Big(x)) + boost::math::lgamma(Big(r));
    for (int n = 0; n < terms; ++n) sum += exp(n * lb - boost::math::lgamma(Big(n) * r + 1));
    return static_cast<double>(sqrt(sum));
}

SpectralVector random_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g;
    std::vector<double> v(dim);
    for (auto& x : v) x = g(rng);
    return SpectralVector(v);
}

}  // namespace

TEST_CASE("eigenstructure invariants") {
    auto eig = Eigenstructure::power_law(2.0, 1.5, 0.5, 0.25);
    for (std::size_t n = 1; n < 200; ++n) {
        CHECK(eig.lambda(n) < eig.eta());
        CHECK(eig.lambda(n + 1) < eig.lambda(n));
        CHECK(eig.gap(n) > 0.0);
    }
    auto h = heat();
    for (std::size_t n = 1; n < 200; ++n) CHECK(h.gap(n + 1) > h.gap(n));
    CHECK_THROWS_AS(Eigenstructure::power_law(-1.0, 2.0), DomainError);
    CHECK_THROWS_AS(Eigenstructure::power_law(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(Eigenstructure::explicit_list({-1.0, 0.5}, 0.0), DomainError);
    auto ex = Eigenstructure::explicit_list({-1.0, -4.0, -9.0});
    CHECK(ex.mode_count() == std::optional<std::size_t>(3));
    CHECK_THROWS_AS(ex.lambda(4), DomainError);
}

TEST_CASE("hr_norm examples") {
    auto eig = heat();
    CHECK(hr_norm(SpectralVector({1.0, 0.0, 0.0}), 0.0, eig) == doctest::Approx(1.0));
    CHECK(hr_norm(SpectralVector::unit(3, 1), 0.5, eig) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
    for (double r : {-1.0, 0.0, 0.5, 2.0}) CHECK(hr_norm(SpectralVector(5), r, eig) == 0.0);
    // Hand evaluation: x = (1, 2), r = 1 -> sqrt(pi^4 + 4 (4 pi^2)^2).
    double expected = std::sqrt(kPi2 * kPi2 + 4.0 * 16.0 * kPi2 * kPi2);
    CHECK(hr_norm(SpectralVector({1.0, 2.0}), 1.0, eig) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("hr_norm overflow is a numerical failure") {
    auto eig = heat();
    SpectralVector x(std::vector<double>(1000, 1.0));
    CHECK_THROWS_AS(hr_norm(x, 60.0, eig), NumericalError);
}

TEST_CASE("hr_norm direct and log-domain routes agree") {
    std::mt19937_64 rng(7);
    auto eig = Eigenstructure::power_law(3.0, 1.7, 0.4, 0.1);
    for (int trial = 0; trial < 50; ++trial) {
        auto x = random_vector(rng, 1 + trial * 7);
        double r = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
        double a = hr_norm(x, r, eig), b = hr_norm_logsum(x, r, eig);
        CHECK(std::abs(a - b) <= 1e-12 * a);
    }
}

TEST_CASE("project examples and contraction") {
    SpectralVector x({3.0, 4.0, 5.0});
    CHECK(project(x, ModeSet::prefix(2)) == SpectralVector({3.0, 4.0, 0.0}));
    CHECK(project(x, ModeSet::full()) == x);
    CHECK(project(x, ModeSet::mask({false, true, true})) == SpectralVector({0.0, 4.0, 5.0}));

    std::mt19937_64 rng(11);
    auto eig = heat();
    for (int trial = 0; trial < 40; ++trial) {
        auto v = random_vector(rng, 32);
        std::vector<bool> bits(32);
        for (std::size_t i = 0; i < 32; ++i) bits[i] = (rng() & 1) != 0;
        ModeSet I = trial % 2 ? ModeSet::mask(bits) : ModeSet::prefix(trial);
        auto p = project(v, I);
        CHECK(project(p, I) == p);
        for (double r : {-1.0, 0.0, 0.3, 1.0}) CHECK(hr_norm(p, r, eig) <= hr_norm(v, r, eig) * (1 + 1e-15));
    }
}

TEST_CASE("mode sets") {
    ModeSet p = ModeSet::prefix(3);
    ModeSet m = ModeSet::mask({true, true, true});
    for (std::size_t n = 1; n <= 10; ++n) CHECK(p.contains(n) == m.contains(n));
    CHECK(p.complement().contains(4));
    CHECK_FALSE(p.complement().contains(3));
    CHECK(ModeSet::full().contains(1000000));
    CHECK_FALSE(ModeSet::empty().contains(1));
}

TEST_CASE("semigroup examples and laws") {
    auto eig = Eigenstructure::explicit_list({-1.0, -2.0, -5.0});
    SpectralVector x({1.0, -2.0, 0.5});
    CHECK(semigroup_apply(x, 0.0, eig) == x);
    CHECK(semigroup_apply(SpectralVector::unit(3, 1), 1.0, eig)[0] == doctest::Approx(0.36787944117144233));

    auto h = heat();
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        auto v = random_vector(rng, 6);
        double s = std::uniform_real_distribution<double>(0.0, 0.05)(rng);
        double t = std::uniform_real_distribution<double>(0.0, 0.05)(rng);
        auto a = semigroup_apply(semigroup_apply(v, s, h), t, h);
        auto b = semigroup_apply(v, s + t, h);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(std::abs(a[i] - b[i]) <= 1e-12 * std::abs(b[i]) + 1e-300);
            CHECK(std::signbit(a[i]) == std::signbit(v[i]));
        }
    }
}

TEST_CASE("projection operator norm") {
    auto eig = heat();
    CHECK(projection_operator_norm(ModeSet::prefix(5), 0.0, eig) == 1.0);
    CHECK(projection_operator_norm(ModeSet::prefix(1), 1.0, eig) ==
          doctest::Approx(1.0 / (4.0 * kPi2)).epsilon(1e-14));
    CHECK(projection_operator_norm(ModeSet::prefix(1), 1.0, eig) == doctest::Approx(0.025330).epsilon(1e-4));
    for (double r : {0.25, 0.5, 2.0}) {
        double n1 = projection_operator_norm(ModeSet::prefix(9), 1.0, eig);
        CHECK(projection_operator_norm(ModeSet::prefix(9), r, eig) ==
              doctest::Approx(std::pow(n1, r)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(projection_operator_norm(ModeSet::full(), 1.0, eig), DomainError);
    auto ex = Eigenstructure::explicit_list({-1.0, -4.0});
    CHECK_THROWS_AS(projection_operator_norm(ModeSet::prefix(2), 1.0, ex), DomainError);

    // Operator bound on random vectors, approached on the infimum mode.
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t N = 1 + trial % 10;
        auto x = random_vector(rng, 40);
        ModeSet J = ModeSet::prefix(N).complement();
        double bound = projection_operator_norm(ModeSet::prefix(N), 0.5, eig);
        CHECK(hr_norm(project(x, J), -0.5, eig) <= bound * hr_norm(x, 0.0, eig) * (1 + 1e-14));
        auto e = SpectralVector::unit(40, N + 1);
        CHECK(hr_norm(project(e, J), -0.5, eig) == doctest::Approx(bound).epsilon(1e-14));
    }
}

TEST_CASE("smoothing bound") {
    CHECK(smoothing_bound(0.0) == 1.0);
    CHECK(smoothing_bound(1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
    CHECK_THROWS_AS(smoothing_bound(-0.1), DomainError);
    CHECK_THROWS_AS(smoothing_bound(1.5), DomainError);
    // sup_t (t g)^r e^{-t g} over a fine log grid per mode.
    auto eig = Eigenstructure::power_law(2.0, 1.3, 0.7, 0.0);
    for (double r : {0.1, 0.5, 0.9, 1.0}) {
        for (std::size_t n : {1u, 3u, 20u}) {
            double g = eig.gap(n), best = 0.0;
            for (int k = 0; k <= 4000; ++k) {
                double t = std::exp(-12.0 + 16.0 * k / 4000.0);
                best = std::max(best, std::pow(t * g, r) * std::exp(-t * g));
            }
            CHECK(best <= smoothing_bound(r) + 1e-12);
            CHECK(best >= smoothing_bound(r) * (1 - 1e-3));
        }
    }
}

TEST_CASE("calE values") {
    for (double r : {0.1, 0.5, 1.0}) CHECK(calE(r, 0.0) == 1.0);
    CHECK(calE(1.0, 1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
    // 2000-term extended-precision series; frozen value 1.1628557068511864e11.
    double reference = calE_series(0.5, 2.0, 2000);
    CHECK(reference == doctest::Approx(116285570685.11864).epsilon(1e-15));
    CHECK(calE(0.5, 2.0) == doctest::Approx(reference).epsilon(1e-12));
    // 200 terms are not enough at this argument.
    CHECK(std::abs(calE_series(0.5, 2.0, 200) - reference) / reference > 1e-10);
    CHECK(calE(0.25, 1.0) == doctest::Approx(6.6434524231515258e37).epsilon(1e-12));
    CHECK(calE(0.75, 0.5) == doctest::Approx(1.1903197578391927).epsilon(1e-13));
    CHECK_THROWS_AS(calE(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(calE(1.5, 1.0), DomainError);
    CHECK_THROWS_AS(calE(0.5, -1.0), DomainError);
    CHECK(log_calE(0.5, 5.0) > 700.0);
    CHECK_THROWS_AS(calE(0.5, 5.0), NumericalError);
    CHECK_THROWS_AS(log_calE(0.5, 40.0), NumericalError);
}

TEST_CASE("calE is nondecreasing in x") {
    for (double r : {0.2, 0.5, 0.8, 1.0}) {
        double prev = 0.0;
        for (int k = 0; k <= 20; ++k) {
            double v = log_calE(r, 0.05 * k);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("exp variance factor") {
    CHECK(exp_variance_factor(-2.0, 1.0) == doctest::Approx(-std::expm1(-4.0) / 4.0).epsilon(1e-15));
    CHECK(exp_variance_factor(0.0, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(exp_variance_factor(1e-9, 1.0) == doctest::Approx(1.000000001).epsilon(1e-14));
}
