#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "seelab/analytics.hpp"
#include "seelab/errors.hpp"
#include "seelab/operators.hpp"
#include "seelab/simulate.hpp"
#include "test_support.hpp"

using namespace seelab;
using namespace seelab::test;

namespace {

// sup_x |f(x)| over a uniform grid.
template <class F>
double grid_sup(F f, double lo, double hi, int points) {
    double best = 0.0;
    for (int i = 0; i <= points; ++i) best = std::max(best, std::abs(f(lo + (hi - lo) * i / points)));
    return best;
}

}  // namespace

TEST_CASE("profile derivatives against finite differences") {
    for (Profile p : {Profile::Tanh, Profile::InvSqrt1px2}) {
        for (int k = 0; k < 4; ++k) {
            for (double x : {-2.3, -0.7, 0.0, 0.4, 1.9}) {
                const double h = 1e-5;
                double fd = (profile_derivative(p, k, x + h) - profile_derivative(p, k, x - h)) / (2 * h);
                CHECK(profile_derivative(p, k + 1, x) == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("profile sups match 1-D maximization") {
    for (Profile p : {Profile::Tanh, Profile::InvSqrt1px2}) {
        for (int k = 0; k <= 2; ++k) {
            double oracle = grid_sup([&](double x) { return profile_derivative(p, k, x); }, -20.0, 20.0, 400000);
            CHECK(profile_sup(p, k) == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
    CHECK(profile_sup(Profile::InvSqrt1px2, 0) == 1.0);
}

TEST_CASE("eval_drift examples") {
    auto eig = Eigenstructure::explicit_list({-1.0, -2.0});
    SpectralVector x({0.5, -0.5});
    auto z = eval_drift(DriftSpec{}, eig, x, ModeSet::full());
    CHECK(z == SpectralVector(2));
    auto f = eval_drift(tanh_drift(), eig, x, ModeSet::full());
    CHECK(f[0] == doctest::Approx(0.46211715726000974).epsilon(1e-15));
    CHECK(f[1] == doctest::Approx(-0.46211715726000974).epsilon(1e-15));
    CHECK(eval_drift(tanh_drift(), eig, SpectralVector(2), ModeSet::full()) == SpectralVector(2));
    auto partial = eval_drift(tanh_drift(), eig, x, ModeSet::prefix(1));
    CHECK(partial[1] == 0.0);
}

TEST_CASE("eval_diffusion_diag examples") {
    auto eig = heat();
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    SpectralVector x({g(rng), g(rng), g(rng)});
    auto ones = eval_diffusion_diag(additive(0.0), eig, x, ModeSet::full());
    for (std::size_t i = 0; i < 3; ++i) CHECK(ones[i] == 1.0);
    auto b = eval_diffusion_diag(nemytskii(0.0), eig, SpectralVector(std::vector<double>{1.0}), ModeSet::full());
    CHECK(b[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(diffusion_scale(additive(-0.25), eig, 2) == doctest::Approx(std::pow(4.0 * kPi2, -0.25)).epsilon(1e-15));
    CHECK(diffusion_scale(additive(-0.25), eig, 2) == doctest::Approx(0.39894).epsilon(1e-5));
}

TEST_CASE("diagonal structure and state independence") {
    auto eig = heat();
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(8);
        for (auto& c : v) c = g(rng);
        SpectralVector x(v);
        auto base = eval_diffusion_diag(nemytskii(-0.1), eig, x, ModeSet::full());
        auto drift = eval_drift(tanh_drift(-0.2), eig, x, ModeSet::full());
        std::size_t keep = trial % 8;
        for (std::size_t j = 0; j < 8; ++j) {
            if (j != keep) v[j] += g(rng);
        }
        SpectralVector y(v);
        CHECK(eval_diffusion_diag(nemytskii(-0.1), eig, y, ModeSet::full())[keep] == base[keep]);
        CHECK(eval_drift(tanh_drift(-0.2), eig, y, ModeSet::full())[keep] == drift[keep]);
        CHECK(eval_diffusion_diag(additive(-0.1), eig, x, ModeSet::full()) ==
              eval_diffusion_diag(additive(-0.1), eig, y, ModeSet::full()));
    }
}

TEST_CASE("hs_norm examples") {
    auto eig = heat();
    // Basel sum: r = 0, delta = -1/2 gives sum 1/(pi^2 n^2) = 1/6.
    auto basel = hs_norm(additive(-0.5, 0.0), SpectralVector(4), 0.0, eig, 1000);
    CHECK(basel.value == doctest::Approx(0.40824829046386302).epsilon(1e-13));
    CHECK(basel.tail_sq.lo <= 1.0 / 6.0 - basel.truncated * basel.truncated);
    CHECK(basel.tail_sq.hi >= 1.0 / 6.0 - basel.truncated * basel.truncated);

    DiffusionSpec silent = additive(0.0);
    silent.amplitude = 0.0;
    CHECK(hs_norm(silent, SpectralVector(3), -0.4, eig, 100).value == 0.0);

    // r = -1/4 - 1e-6 rounded to double: tail pi^{4r} zeta(-4r, 10001) (Hurwitz zeta oracle, 30 digits).
    // 4r + 1 is tiny, so the oracle must use the double value of r.
    const double r = -0.25 - 1e-6;
    auto slow = hs_norm(additive(0.0), SpectralVector(1), r, eig, 10000);
    CHECK(slow.tail_sq.lo <= 79574.175479189230);
    CHECK(slow.tail_sq.hi >= 79574.175479189230);
    CHECK(slow.value == doctest::Approx(282.09447158823626).epsilon(1e-10));
    long double partial = 0.0L;
    for (int n = 10000; n >= 1; --n) partial += std::pow(static_cast<long double>(kPi2) * n * n, 2.0L * r);
    CHECK(slow.truncated == doctest::Approx(std::sqrt(static_cast<double>(partial))).epsilon(1e-13));

    CHECK_THROWS_AS(hs_norm(additive(0.0), SpectralVector(1), -0.2, eig, 100), DomainError);
}

TEST_CASE("mollify") {
    auto eig = heat();
    SpectralVector y({1.0, -2.0, 3.0, 0.5});
    CHECK(mollify(y, 0.0, eig) == y);
    CHECK(mollify(SpectralVector::unit(1, 1), 0.1, eig)[0] ==
          doctest::Approx(0.37270783885343791).epsilon(1e-14));
    CHECK(mollify(SpectralVector::unit(1, 1), 0.1, eig)[0] == doctest::Approx(0.37268).epsilon(1e-4));
    SpectralVector ones(std::vector<double>(10, 1.0));
    auto m = mollify(ones, 0.01, eig);
    for (std::size_t i = 1; i < 10; ++i) CHECK(m[i] < m[i - 1]);

    auto shifted = Eigenstructure::power_law(2.0, 1.5, 0.8);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(12);
        for (auto& c : v) c = g(rng);
        SpectralVector x(v);
        double kappa = 0.05 * trial;
        for (double r : {-0.5, 0.0, 0.7}) {
            CHECK(hr_norm(mollify(x, kappa, shifted), r, shifted) <=
                  std::exp(shifted.eta() * kappa) * hr_norm(x, r, shifted) * (1 + 1e-14));
        }
    }
}

TEST_CASE("shift_system") {
    auto eig = Eigenstructure::explicit_list({-1.0}, 0.5);
    auto s = shift_system(eig, DriftSpec{});
    CHECK(s.eig.eta() == 0.0);
    CHECK(s.eig.lambda(1) == -1.5);
    CHECK(s.drift.linear_shift == 0.5);
    auto f = eval_drift(s.drift, s.eig, SpectralVector(std::vector<double>{2.0}), ModeSet::full());
    CHECK(f[0] == doctest::Approx(1.0));

    auto same = shift_system(heat(), tanh_drift());
    CHECK(same.drift.linear_shift == 0.0);
    CHECK(same.eig.lambda(3) == heat().lambda(3));

    // Terminal states of the original and the shifted system under shared noise.
    Model original{Eigenstructure::power_law(2.0, 2.0, 0.7), tanh_drift(0.0, 0.3), nemytskii(0.0, 0.3)};
    auto sh = shift_system(original.eig, original.drift);
    Model moved{sh.eig, sh.drift, original.diffusion};
    SimConfig cfg;
    cfg.T = 0.5;
    cfg.steps = 64;
    cfg.n_ref = 16;
    cfg.xi = SpectralVector(std::vector<double>(16, 0.3));
    for (std::size_t s = 0; s < 4; ++s) {
        auto a = simulate_galerkin(cfg, original, ModeSet::full(), s);
        auto b = simulate_galerkin(cfg, moved, ModeSet::full(), s);
        for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12 * (1.0 + std::abs(a[i])));
    }
}

TEST_CASE("validation") {
    auto eig = heat();
    CHECK_THROWS_AS(validate_diffusion(additive(0.25), eig), DomainError);
    CHECK_THROWS_AS(validate_diffusion(additive(0.3), eig), DomainError);
    CHECK_NOTHROW(validate_diffusion(additive(0.2, 0.46), eig));
    CHECK_THROWS_AS(validate_diffusion(additive(0.0, 0.2), eig), DomainError);
    CHECK_THROWS_AS(validate_drift(tanh_drift(0.0, 0.2), eig), DomainError);
    CHECK_NOTHROW(validate_drift(tanh_drift(0.0, 0.3), eig));
    DriftSpec bad_zero;
    bad_zero.declared_norms[1] = 2.0;
    CHECK_THROWS_AS(validate_drift(bad_zero, eig), DomainError);
    try {
        validate_diffusion(additive(0.3), eig);
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("1/2 - 1/(2 rho) = 0.25") != std::string::npos);
    }
}

TEST_CASE("seminorm probes") {
    auto scalar = Eigenstructure::explicit_list({-1.0});
    ProbeOptions one_mode;
    one_mode.modes = 1;
    one_mode.samples = 2048;
    for (int k = 0; k <= 2; ++k) CHECK(estimate_ckb_seminorm(DriftSpec{}, scalar, k).estimate == 0.0);
    auto d1 = estimate_ckb_seminorm(tanh_drift(0.0, 0.0), scalar, 1, one_mode);
    CHECK(d1.estimate <= 1.0 + 1e-6);
    CHECK(d1.estimate >= 0.95);
    auto b0 = estimate_ckb_seminorm(nemytskii(0.0, 0.0), scalar, 0, one_mode);
    CHECK(b0.estimate <= 1.0 + 1e-12);
    CHECK(b0.estimate >= 0.99);

    DriftSpec declared = tanh_drift(0.0, 0.0);
    declared.declared_norms[1] = 0.5;
    CHECK_FALSE(estimate_ckb_seminorm(declared, scalar, 1, one_mode).consistent);
    declared.declared_norms[1] = 1.0;
    CHECK(estimate_ckb_seminorm(declared, scalar, 1, one_mode).consistent);
}

TEST_CASE("Lip0 norms") {
    auto eig = heat();
    CHECK(drift_lip0_norm(DriftSpec{}, eig, 0.6) == 0.0);
    // Zero-state part of an additive B with delta = 0 in H_{-0.3}: sqrt(pi^{-1.2} zeta(1.2)), 30-digit oracle.
    double b = diffusion_lip0_norm(additive(0.0), eig, 0.6);
    CHECK(b >= 1.1898095284521026 * (1 - 1e-12));
    CHECK(b <= 1.1898095284521026 * 1.001);
    CHECK(std::isinf(drift_lip0_norm(tanh_drift(0.5, 0.9), eig, 0.0)));
}

TEST_CASE("phi constants from 1-D maximization") {
    double lip0 = grid_sup([](double a) { return 2 * a * std::exp(-a * a); }, 0.0, 6.0, 600000);
    double lip1 = grid_sup([](double a) { return std::max(std::abs(4 * a * a - 2), 2.0) * std::exp(-a * a); }, 0.0, 6.0,
                           600000);
    double lip2 = grid_sup([](double a) { return (12 * a - 8 * a * a * a) * std::exp(-a * a); }, 0.0, 6.0, 600000);
    CHECK(lip0 == doctest::Approx(std::sqrt(2.0 / std::numbers::e)).epsilon(1e-10));
    CHECK(phi_exp::lip0 >= lip0);
    CHECK(phi_exp::lip0 == doctest::Approx(lip0).epsilon(1e-6));
    CHECK(phi_exp::lip1 == doctest::Approx(lip1).epsilon(1e-12));
    CHECK(phi_exp::lip2 >= lip2);
    CHECK(phi_exp::lip2 == doctest::Approx(lip2).epsilon(1e-6));
    CHECK(phi_exp::lip2 == doctest::Approx(3.90357).epsilon(1e-6));
    CHECK(phi_exp::lip2_norm >= 1.0 + lip0 + lip1 + lip2);
    CHECK(phi_exp::c1b_norm >= 1.0 + lip0);
}
