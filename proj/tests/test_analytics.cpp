#include <doctest.h>

#include <cmath>
#include <vector>

#include "seelab/analytics.hpp"
#include "seelab/errors.hpp"
#include "seelab/operators.hpp"
#include "seelab/parallel.hpp"
#include "seelab/simulate.hpp"
#include "test_support.hpp"

using namespace seelab;
using namespace seelab::test;

namespace {

OUSetup heat_setup(double delta = 0.0, double T = 1.0) { return OUSetup{heat(), delta, T, 1e-14, 1.0}; }

bool inside(const Certified& c) { return c.lo <= c.value && c.value <= c.hi; }

ParametricInputs with_constants(double c) {
    ParametricInputs in;
    in.c = std::array<double, 6>{c, c, c, c, c, c};
    in.F_c1b = 0.5;
    in.B_c1b = 0.25;
    return in;
}

}  // namespace

TEST_CASE("ou_mode_variance examples and branch continuity") {
    CHECK(ou_mode_variance(-1.0, 1.0, 0.0) == 0.0);
    CHECK(ou_mode_variance(-1.0, 1.0, 1.0) == doctest::Approx(-std::expm1(-2.0) / 2.0).epsilon(1e-15));
    CHECK(ou_mode_variance(-1.0, 1.0, 1.0) == doctest::Approx(0.432332).epsilon(1e-6));
    CHECK(ou_mode_variance(-1.0, 1.0, 60.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ou_mode_variance(-2.0, 3.0, 1e9) == doctest::Approx(9.0 / 4.0).epsilon(1e-15));
    CHECK(ou_mode_variance(-1e-12, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-11));

    // Switch at |2 lambda t| = 1e-6.
    for (double mu : {0.5, 1.0, 2.0}) {
        double below = ou_mode_variance(-5e-7 * (1 - 1e-9), mu, 1.0);
        double above = ou_mode_variance(-5e-7 * (1 + 1e-9), mu, 1.0);
        CHECK(std::abs(below - above) <= 1e-12 * above);
    }
    // Increasing in t.
    double prev = 0.0;
    for (int k = 1; k <= 50; ++k) {
        double v = ou_mode_variance(-3.0, 1.0, 0.05 * k);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("setup validation") {
    CHECK_NOTHROW(validate_ou_setup(heat_setup(0.2)));
    CHECK_THROWS_AS(validate_ou_setup(heat_setup(0.25)), DomainError);
    CHECK_THROWS_AS(validate_ou_setup(heat_setup(0.0, 0.0)), DomainError);
    CHECK_THROWS_AS(sqnorm_weak_error_exact(heat_setup(0.3), ModeSet::prefix(4)), DomainError);
    CHECK_THROWS_AS(cor65_lower_bound(8, 0.25, 1.0), DomainError);
    CHECK_NOTHROW(cor65_lower_bound(8, 0.2499, 1.0));
}

TEST_CASE("squared-norm weak error") {
    auto s = heat_setup();
    auto full = sqnorm_weak_error_exact(s, ModeSet::full());
    CHECK(full.value == 0.0);
    // 1/12 - 1/(2 pi^2), 30-digit oracle; e^{-2 pi^2 n^2} corrections are below 1e-30.
    auto one = sqnorm_weak_error_exact(s, ModeSet::prefix(1));
    CHECK(one.value == doctest::Approx(0.032672741512164448).epsilon(1e-13));
    CHECK(one.lo <= 0.032672741512164448 * (1 + 1e-15));
    CHECK(one.hi >= 0.032672741512164448 * (1 - 1e-15));
    double prev = one.value;
    for (std::size_t N = 2; N <= 64; N *= 2) {
        auto e = sqnorm_weak_error_exact(s, ModeSet::prefix(N));
        CHECK(inside(e));
        CHECK(e.value < prev);
        prev = e.value;
    }
    // Complement identity: E||X||^2 = E||X^I||^2 + error.
    auto total = sqnorm_expectation(s, ModeSet::full());
    auto head = sqnorm_expectation(s, ModeSet::prefix(5));
    auto tail = sqnorm_weak_error_exact(s, ModeSet::prefix(5));
    CHECK(total.value == doctest::Approx(head.value + tail.value).epsilon(1e-13));
}

TEST_CASE("exp functional expectation") {
    auto s = heat_setup();
    CHECK(exp_functional_expectation(s, ModeSet::empty()).value == 1.0);

    OUSetup single{Eigenstructure::explicit_list({-1.0}), 0.0, 1.0, 1e-14, 1.0};
    auto p = exp_functional_expectation(single, ModeSet::full());
    CHECK(p.value == doctest::Approx(0.73231785568008439).epsilon(1e-14));
    CHECK(p.value == doctest::Approx(0.73235).epsilon(1e-4));

    double prev = 1.0;
    for (std::size_t N = 1; N <= 20; ++N) {
        double v = exp_functional_expectation(s, ModeSet::prefix(N)).value;
        CHECK(v <= prev);
        prev = v;
    }
    auto full = exp_functional_expectation(s, ModeSet::full());
    CHECK(inside(full));
    CHECK(full.value < prev);
    CHECK(full.value > 0.0);
}

TEST_CASE("exp weak error: exact value, lower bound and scaling") {
    auto s = heat_setup();
    CHECK(exp_weak_error_exact(s, ModeSet::full()).value == 0.0);
    CHECK(exp_weak_error_lower_bound(s, ModeSet::full()).value == 0.0);
    for (std::size_t N : {1u, 2u, 4u, 8u, 16u, 32u, 64u, 128u, 256u}) {
        auto exact = exp_weak_error_exact(s, ModeSet::prefix(N));
        auto lower = exp_weak_error_lower_bound(s, ModeSet::prefix(N));
        CHECK(inside(exact));
        CHECK(lower.value > 0.0);
        CHECK(lower.hi <= exact.lo);
    }
    // lambda_N^{-1/2} scaling: N = 16 to 32 halves the error.
    double e16 = exp_weak_error_exact(s, ModeSet::prefix(16)).value;
    double e32 = exp_weak_error_exact(s, ModeSet::prefix(32)).value;
    CHECK(e32 / e16 == doctest::Approx(0.5).epsilon(0.1));

    // Finite-range difference agrees with the difference of exact errors.
    auto between = exp_weak_error_between(s, ModeSet::prefix(4), ModeSet::prefix(16));
    double diff = exp_weak_error_exact(s, ModeSet::prefix(4)).value - e16;
    CHECK(between.value == doctest::Approx(diff).epsilon(1e-10));
}

TEST_CASE("power-law lower bounds") {
    for (double delta : {0.0, -0.1, 0.2}) {
        auto s = heat_setup(delta);
        for (std::size_t N = 4; N <= 256; N *= 2) {
            auto exact = exp_weak_error_exact(s, ModeSet::prefix(N));
            auto p64 = prop64_lower_bound(s, N);
            auto c65 = cor65_lower_bound(N, delta, 1.0);
            CHECK(p64.hi <= exact.lo);
            CHECK(c65.hi <= p64.lo);
            CHECK(c65.hi <= exp_weak_error_lower_bound(s, ModeSet::prefix(N)).lo);
        }
        // Both share the lambda_N power, so their ratio is constant in N.
        double r4 = cor65_lower_bound(4, delta, 1.0).value / prop64_lower_bound(s, 4).value;
        double r256 = cor65_lower_bound(256, delta, 1.0).value / prop64_lower_bound(s, 256).value;
        CHECK(r4 == doctest::Approx(r256).epsilon(1e-12));
        // bound(2N) / bound(N) = 2^{-rho (1 - (1/rho + 2 delta))}.
        double ratio = prop64_lower_bound(s, 128).value / prop64_lower_bound(s, 64).value;
        CHECK(ratio == doctest::Approx(std::pow(2.0, -2.0 * (0.5 - 2.0 * delta))).epsilon(1e-12));
    }
    auto steep = heat_setup(-2.0);
    for (std::size_t N : {4u, 16u, 64u}) {
        CHECK(prop64_lower_bound(steep, N).hi <= exp_weak_error_exact(steep, ModeSet::prefix(N)).lo);
    }
    OUSetup shifted{Eigenstructure::power_law(kPi2, 2.0, 0.5), 0.0, 1.0, 1e-14, 1.0};
    CHECK_THROWS_AS(prop64_lower_bound(shifted, 4), DomainError);
}

TEST_CASE("phi metadata from 1-D maximization") {
    CHECK(phi_exp::lip0 == doctest::Approx(std::sqrt(2.0 / std::exp(1.0))).epsilon(1e-6));
    CHECK(phi_exp::lip0 >= std::sqrt(2.0 / std::exp(1.0)));
    CHECK(phi_exp::lip2_norm >= phi_exp::value_at_zero + phi_exp::lip0 + phi_exp::lip1 + phi_exp::lip2 - 1e-5);
}

TEST_CASE("projection weak-error bound") {
    Prop21Inputs trivial;
    trivial.moment3 = 2.0;
    CHECK(prop21_weak_bound(trivial, 0.3, 0.6, 2.0, 0.01) ==
          doctest::Approx(phi_exp::lip2_norm * 2.0 * 0.01 / std::pow(2.0, 0.3)).epsilon(1e-14));
    CHECK_THROWS_AS(prop21_weak_bound(trivial, 0.4, 0.6, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(prop21_weak_bound(trivial, -0.1, 0.6, 1.0, 0.1), DomainError);

    auto s = heat_setup();
    auto eig = heat();
    Prop21Inputs in;
    in.moment3 = gaussian_moment3_factor(s);
    in.B_lip0 = diffusion_lip0_norm(additive(0.0), eig, 0.6);
    double prev = INFINITY;
    for (std::size_t N : {2u, 4u, 8u, 16u, 64u, 256u}) {
        double bound = prop21_weak_bound(in, 0.3, 0.6, 1.0, projection_operator_norm(ModeSet::prefix(N), 0.3, eig));
        CHECK(bound >= exp_weak_error_exact(s, ModeSet::prefix(N)).hi);
        CHECK(bound <= prev);
        prev = bound;
    }
}

TEST_CASE("gaussian moment factor") {
    // Single mode with variance v: E X^4 = 3 v^2.
    OUSetup big{Eigenstructure::explicit_list({-0.01}), 0.0, 100.0, 1e-14, 1.0};
    double v = ou_mode_variance(-0.01, 1.0, 100.0);
    CHECK(gaussian_moment3_factor(big) == doctest::Approx(std::pow(3.0 * v * v, 0.75)).epsilon(1e-12));
    CHECK(gaussian_moment3_factor(heat_setup()) == 1.0);
}

TEST_CASE("strong mollification bound: trivial cases") {
    Prop41Inputs in{1.0, 0.5, 0.5};
    CHECK(prop41_strong_moll_bound(in, 2.0, 0.6, 0.19, 1.0, 0.0) == 0.0);
    CHECK(prop41_strong_moll_bound(Prop41Inputs{1.0, 0.0, 0.0}, 2.0, 0.6, 0.19, 1.0, 0.1) == 0.0);
    double a = prop41_strong_moll_bound(in, 2.0, 0.6, 0.19, 1.0, 0.01);
    double b = prop41_strong_moll_bound(in, 2.0, 0.6, 0.19, 1.0, 0.04);
    CHECK(a > 0.0);
    CHECK(b / a == doctest::Approx(std::pow(4.0, 0.19)).epsilon(1e-12));
    CHECK_THROWS_AS(prop41_strong_moll_bound(in, 1.5, 0.6, 0.1, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(prop41_strong_moll_bound(in, 2.0, 0.6, 0.2, 1.0, 0.1), DomainError);
}

TEST_CASE("parametric bounds") {
    BoundGeometry g{0.3, 0.3, 0.35, 1.0, 100.0};
    ParametricInputs missing;
    for (auto form : {WeakForm::Cor3_3, WeakForm::Cor3_4, WeakForm::Cor5_2})
        CHECK_THROWS_AS(parametric_weak_bound(missing, form, g), DomainError);

    ParametricInputs zero = with_constants(0.0);
    zero.phi_c3b = 0.0;
    zero.phi_c1b = 0.0;
    for (auto form : {WeakForm::Cor3_3, WeakForm::Cor3_4, WeakForm::Cor5_2})
        CHECK(parametric_weak_bound(zero, form, g) == 0.0);

    for (auto form : {WeakForm::Cor3_3, WeakForm::Cor3_4, WeakForm::Cor5_2}) {
        double one = parametric_weak_bound(with_constants(1.0), form, g);
        double two = parametric_weak_bound(with_constants(2.0), form, g);
        CHECK(two > one);
        CHECK(two <= 2.0 * one * (1 + 1e-14));
    }

    // Cor5_2 scales as gap^{-(rho - 4 (theta - vartheta))}.
    auto in = with_constants(1.0);
    BoundGeometry far = g;
    far.gap = 1600.0;
    double ratio = parametric_weak_bound(in, WeakForm::Cor5_2, far) / parametric_weak_bound(in, WeakForm::Cor5_2, g);
    CHECK(ratio == doctest::Approx(std::pow(16.0, -(0.3 - 4.0 * 0.05))).epsilon(1e-12));
    BoundGeometry bad = g;
    bad.rho = 0.1;
    CHECK_THROWS_AS(parametric_weak_bound(in, WeakForm::Cor5_2, bad), DomainError);
}

TEST_CASE("optimize_kappa") {
    std::vector<double> grid{1e-3, 1e-2, 1e-1, 1.0};
    auto pick = optimize_kappa([](double) { return 1.0; }, [](double k) { return k; }, grid);
    CHECK(pick.kappa == 1e-3);
    CHECK(pick.bound == doctest::Approx(1.001));
    CHECK_THROWS_AS(optimize_kappa([](double) { return 1.0; }, [](double k) { return k; }, {}), DomainError);
    CHECK_THROWS_AS(optimize_kappa([](double) { return 1.0; }, [](double k) { return k; }, {0.0, 0.5}),
                    DomainError);

    // a k^{-eps} + b k^s has its minimum at (eps a / (s b))^{1/(s + eps)}.
    const double a = 1e-3, eps = 0.5, b = 1.0, s = 1.0;
    std::vector<double> log_grid;
    const int points = 200;
    for (int i = 0; i < points; ++i) log_grid.push_back(std::pow(10.0, -4.0 + 4.0 * i / (points - 1)));
    auto weak = [&](double k) { return a * std::pow(k, -eps); };
    auto strong = [&](double k) { return b * std::pow(k, s); };
    auto best = optimize_kappa(weak, strong, log_grid);
    double analytic = std::pow(eps * a / (s * b), 1.0 / (s + eps));
    CHECK(std::abs(std::log10(best.kappa) - std::log10(analytic)) <= 4.0 / (points - 1));
    CHECK(best.bound <= weak(1.0) + strong(1.0));
    CHECK(best.bound <= weak(1e-4) + strong(1e-4));
}

TEST_CASE("K moment estimates") {
    SimConfig cfg;
    cfg.T = 1.0;
    cfg.steps = 16;
    cfg.n_ref = 8;
    cfg.n_galerkin = 8;
    cfg.samples = 64;
    Model zero = heat_model();
    zero.diffusion.amplitude = 0.0;
    for (int r = 1; r <= 4; ++r) {
        auto k = estimate_K_moment(cfg, zero, 8, r);
        CHECK(k.mean == 1.0);
        CHECK(k.std_error == 0.0);
    }
    CHECK_THROWS_AS(estimate_K_moment(cfg, zero, 8, 5), DomainError);

    // Monotonicity: E max{1, ||X||^2} >= max{1, E ||X||^2}.
    Model loud = heat_model();
    loud.diffusion.amplitude = 8.0;
    cfg.samples = 4000;
    auto k2 = estimate_K_moment(cfg, loud, 8, 2);
    OUSetup s{heat(), 0.0, 1.0, 1e-14, 8.0};
    double second = sqnorm_expectation(s, ModeSet::prefix(8)).value;
    CHECK(k2.mean >= std::max(1.0, second) - 4.0 * k2.std_error);

    // Stationary single mode: X ~ N(0, 1/2); E max{1, X^2} = 1.1289041451851548 (quadrature oracle).
    SimConfig one;
    one.T = 20.0;
    one.steps = 200;
    one.n_ref = 1;
    one.n_galerkin = 1;
    one.samples = 40000;
    one.seed = 77;
    Model ou{Eigenstructure::explicit_list({-1.0}), DriftSpec{}, additive(0.0, 0.0)};
    auto kg = estimate_K_moment(one, ou, 1, 2, ExecPolicy::Parallel, 4);
    CHECK(std::abs(kg.mean - 1.1289041451851548) <= 4.0 * kg.std_error);
}

TEST_CASE("tail certification is consistent under refinement") {
    auto loose = heat_setup(0.2);
    loose.tail_tol = 1e-6;
    auto tight = heat_setup(0.2);
    tight.tail_tol = 1e-14;
    for (std::size_t N : {1u, 8u, 64u}) {
        auto a = sqnorm_weak_error_exact(loose, ModeSet::prefix(N));
        auto b = sqnorm_weak_error_exact(tight, ModeSet::prefix(N));
        CHECK(inside(a));
        CHECK(inside(b));
        CHECK(std::abs(a.value - b.value) <= (a.hi - a.lo) + 1e-15 * b.value);
        CHECK(b.hi - b.lo <= a.hi - a.lo);
        auto pa = exp_functional_expectation(loose, ModeSet::prefix(N).complement());
        auto pb = exp_functional_expectation(tight, ModeSet::prefix(N).complement());
        CHECK(std::abs(pa.value - pb.value) <= (pa.hi - pa.lo) + 1e-15);
    }
}

TEST_CASE("closed forms agree with simulation") {
    auto s = heat_setup(-0.25);
    SimConfig cfg;
    cfg.T = 1.0;
    cfg.steps = 1;
    cfg.n_ref = 6;
    cfg.n_galerkin = 6;
    cfg.samples = 20000;
    cfg.seed = 99;
    cfg.scheme = Scheme::ExactOU;
    Model m = heat_model(DriftSpec{}, additive(-0.25));
    auto slots = run_samples(cfg.samples, 2, ExecPolicy::Parallel, [&](std::size_t i, double* row) {
        auto x = simulate_exact_ou(cfg, m, ModeSet::full(), i);
        double sq = 0.0;
        for (std::size_t n = 0; n < x.dim(); ++n) sq += x[n] * x[n];
        row[0] = sq;
        row[1] = std::exp(-sq);
    });
    auto sq = mean_stderr(slots.column(0));
    auto ex = mean_stderr(slots.column(1));
    CHECK(std::abs(sq.mean - sqnorm_expectation(s, ModeSet::prefix(6)).value) <= 4.0 * sq.std_error);
    CHECK(std::abs(ex.mean - exp_functional_expectation(s, ModeSet::prefix(6)).value) <= 4.0 * ex.std_error);
}
