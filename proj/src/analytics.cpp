#include "seelab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "seelab/errors.hpp"

namespace seelab {

namespace {

constexpr double kPad = 1e-14;

Certified widen(Certified c, double rel = kPad) {
    c.lo -= rel * std::abs(c.lo);
    c.hi += rel * std::abs(c.hi);
    return c;
}

double gap_cont(const Eigenstructure& eig, double x) {
    if (eig.is_power_law()) return eig.gap_at(x);
    return eig.gap(static_cast<std::size_t>(x));
}

double lambda_cont(const Eigenstructure& eig, double x) {
    if (eig.is_power_law()) return eig.lambda_at(x);
    return eig.lambda(static_cast<std::size_t>(x));
}

double variance_at(const OUSetup& s, double x) {
    double mu = s.amplitude * std::exp(s.delta * std::log(gap_cont(s.eig, x)));
    return ou_mode_variance(lambda_cont(s.eig, x), mu, s.T);
}

ModeSumOptions sum_options(const OUSetup& s) {
    ModeSumOptions o;
    o.tail_tol = s.tail_tol;
    return o;
}

// Enclosure of -1/2 sum_{b in J} log(1 + 2 Var_b) = log P_J.
Certified log_product(const OUSetup& s, const ModeSet& J) {
    Certified sum = certified_mode_sum(
        s.eig, J, [&](double x) { return std::log1p(2.0 * variance_at(s, x)); }, sum_options(s));
    return {-0.5 * sum.value, -0.5 * sum.hi, -0.5 * sum.lo};
}

Certified exp_of(const Certified& log_value) {
    return widen({std::exp(log_value.value), std::exp(log_value.lo), std::exp(log_value.hi)});
}

// 1 - P_J from the log enclosure without cancellation.
Certified one_minus_exp(const Certified& log_value) {
    return widen({-std::expm1(log_value.value), -std::expm1(log_value.hi), -std::expm1(log_value.lo)});
}

Certified product(const Certified& a, const Certified& b) {
    // Both factors are nonnegative here.
    return widen({a.value * b.value, std::max(0.0, a.lo) * std::max(0.0, b.lo), a.hi * b.hi});
}

ModeSet complement_of(const ModeSet& I) { return I.complement(); }

void require_power_law_origin(const OUSetup& s, const char* who) {
    const PowerLaw* pl = s.eig.power_law_params();
    if (!pl || s.eig.eta() != 0.0 || pl->offset != 0.0) {
        std::ostringstream msg;
        msg << who << " requires lambda_n = -c n^rho with eta = 0";
        throw DomainError(msg.str());
    }
    if (s.amplitude != 1.0) {
        std::ostringstream msg;
        msg << who << " requires mu_n = |lambda_n|^delta (unit amplitude)";
        throw DomainError(msg.str());
    }
}

double lower_bound_shape(double S) { return S / (2.0 * std::pow(1.0 + S, 1.5)); }

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " must be finite and >= 0";
        throw DomainError(msg.str());
    }
}

double exp_checked(double log_value, const char* who) {
    if (log_value == -std::numeric_limits<double>::infinity()) return 0.0;
    if (!(log_value < std::log(std::numeric_limits<double>::max()))) {
        std::ostringstream msg;
        msg << who << ": bound overflows double precision (log = " << log_value << ")";
        throw NumericalError(msg.str());
    }
    return std::exp(log_value);
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

}  // namespace

double ou_mode_variance(double lambda, double mu, double t) {
    if (!(t >= 0.0)) throw DomainError("ou_mode_variance: t must be >= 0");
    return mu * mu * exp_variance_factor(lambda, t);
}

void validate_ou_setup(const OUSetup& s) {
    if (!(s.T > 0.0) || !std::isfinite(s.T)) throw DomainError("OU setup: T must be positive and finite");
    if (!(s.tail_tol > 0.0)) throw DomainError("OU setup: tail_tol must be positive");
    require_nonnegative(s.amplitude, "OU setup: amplitude");
    if (const PowerLaw* pl = s.eig.power_law_params()) {
        double limit = 0.5 - 1.0 / (2.0 * pl->rho);
        if (!(s.delta < limit)) {
            std::ostringstream msg;
            msg << "OU setup: delta = " << s.delta << " violates delta < 1/2 - 1/(2 rho) = " << limit;
            throw DomainError(msg.str());
        }
    }
}

double mode_variance(const OUSetup& s, std::size_t n) { return variance_at(s, static_cast<double>(n)); }

Certified sqnorm_expectation(const OUSetup& s, const ModeSet& J) {
    validate_ou_setup(s);
    return certified_mode_sum(s.eig, J, [&](double x) { return variance_at(s, x); }, sum_options(s));
}

Certified sqnorm_weak_error_exact(const OUSetup& s, const ModeSet& I) {
    return sqnorm_expectation(s, complement_of(I));
}

Certified exp_functional_expectation(const OUSetup& s, const ModeSet& J) {
    validate_ou_setup(s);
    return exp_of(log_product(s, J));
}

Certified exp_weak_error_exact(const OUSetup& s, const ModeSet& I) {
    validate_ou_setup(s);
    Certified p_kept = exp_of(log_product(s, I));
    Certified missing = one_minus_exp(log_product(s, complement_of(I)));
    return product(p_kept, missing);
}

Certified exp_weak_error_between(const OUSetup& s, const ModeSet& I, const ModeSet& J) {
    validate_ou_setup(s);
    if (I.is_complemented() || J.is_complemented()) {
        throw DomainError("exp_weak_error_between: both mode sets must be finite");
    }
    std::size_t limit = std::max(I.extent(), J.extent());
    std::vector<bool> extra(limit, false);
    for (std::size_t n = 1; n <= limit; ++n) {
        if (I.contains(n) && !J.contains(n)) throw DomainError("exp_weak_error_between: I must be a subset of J");
        extra[n - 1] = J.contains(n) && !I.contains(n);
    }
    Certified p_kept = exp_of(log_product(s, I));
    Certified missing = one_minus_exp(log_product(s, ModeSet::mask(extra)));
    return product(p_kept, missing);
}

Certified exp_weak_error_lower_bound(const OUSetup& s, const ModeSet& I) {
    validate_ou_setup(s);
    Certified S = sqnorm_weak_error_exact(s, I);
    Certified p_full = exp_of(log_product(s, ModeSet::full()));
    double lo_s = std::max(0.0, S.lo);
    double f_lo = lower_bound_shape(lo_s), f_hi = lower_bound_shape(S.hi);
    // S / (2 (1+S)^{3/2}) increases up to S = 2 and decreases afterwards.
    double shape_hi = (lo_s <= 2.0 && S.hi >= 2.0) ? lower_bound_shape(2.0) : std::max(f_lo, f_hi);
    Certified shape = widen({lower_bound_shape(S.value), std::min(f_lo, f_hi), shape_hi});
    return product(p_full, shape);
}

Certified prop64_lower_bound(const OUSetup& s, std::size_t N) {
    require_power_law_origin(s, "prop64_lower_bound");
    validate_ou_setup(s);
    if (N < 1) throw DomainError("prop64_lower_bound: N must be >= 1");
    const PowerLaw& pl = *s.eig.power_law_params();
    const double c = pl.c, rho = pl.rho, d = s.delta;
    Certified p_full = exp_of(log_product(s, ModeSet::full()));
    double lambda_n = std::abs(s.eig.lambda(N));
    double numerator = -std::expm1(-2.0 * s.T * c) * std::pow(lambda_n, -(1.0 - (1.0 / rho + 2.0 * d)));
    double inner = rho - 2.0 * d * rho + std::pow(c, 2.0 * d - 1.0) * std::pow(rho - 2.0 * d * rho - 1.0, -1.0 / 3.0);
    double denominator = std::pow(2.0, 1.0 - 2.0 * d * rho + rho) * std::pow(c, 1.0 / rho) * std::pow(inner, 1.5);
    double k = numerator / denominator;
    return widen({p_full.value * k, p_full.lo * k, p_full.hi * k});
}

Certified cor65_lower_bound(std::size_t N, double delta, double T, double tail_tol) {
    if (!(delta < 0.25)) throw DomainError("cor65_lower_bound: delta must be < 1/4");
    if (N < 1) throw DomainError("cor65_lower_bound: N must be >= 1");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    OUSetup s{Eigenstructure::power_law(pi2, 2.0), delta, T, tail_tol, 1.0};
    validate_ou_setup(s);
    Certified p_full = exp_of(log_product(s, ModeSet::full()));
    double lambda_n = pi2 * static_cast<double>(N) * static_cast<double>(N);
    double constant = std::pow(2.0, 4.0 * delta - 5.0) * -std::expm1(-T) /
                      std::pow(2.0 - 4.0 * delta + std::pow(2.0, 7.0 * delta - 7.0) * std::pow(1.0 - 4.0 * delta, -1.0 / 3.0),
                               1.5);
    double k = constant * std::pow(lambda_n, -(1.0 - (0.5 + 2.0 * delta)));
    return widen({p_full.value * k, p_full.lo * k, p_full.hi * k});
}

double gaussian_moment3_factor(const OUSetup& s) {
    validate_ou_setup(s);
    Certified m2 = sqnorm_expectation(s, ModeSet::full());
    Certified m4 = certified_mode_sum(
        s.eig, ModeSet::full(),
        [&](double x) {
            double v = variance_at(s, x);
            return v * v;
        },
        sum_options(s));
    double fourth = m2.hi * m2.hi + 2.0 * m4.hi;
    return std::max(1.0, std::pow(fourth, 0.75));
}

double prop21_weak_bound(const Prop21Inputs& in, double rho, double vartheta, double T, double proj_norm) {
    if (!(vartheta >= 0.0 && vartheta < 1.0)) throw DomainError("prop21: vartheta must lie in [0, 1)");
    if (!(rho >= 0.0 && rho < 1.0 - vartheta)) throw DomainError("prop21: rho must lie in [0, 1 - vartheta)");
    if (!(T > 0.0)) throw DomainError("prop21: T must be positive");
    require_nonnegative(in.phi_lip2, "prop21: ||phi||_Lip2");
    require_nonnegative(in.F_lip0, "prop21: ||F||_Lip0");
    require_nonnegative(in.B_lip0, "prop21: ||B||_Lip0");
    require_nonnegative(proj_norm, "prop21: projection norm");
    double moment = std::max(1.0, in.moment3);
    double bracket = std::pow(T, -rho) +
                     std::pow(T, 1.0 - rho - vartheta) * (in.F_lip0 + in.B_lip0) / (1.0 - rho - vartheta);
    return in.phi_lip2 * moment * bracket * proj_norm;
}

double prop41_strong_moll_bound(const Prop41Inputs& in, double p, double vartheta, double rho, double T,
                                double kappa) {
    if (!(p >= 2.0)) throw DomainError("prop41: p must be >= 2");
    if (!(vartheta >= 0.0 && vartheta < 1.0)) throw DomainError("prop41: vartheta must lie in [0, 1)");
    if (!(rho >= 0.0 && rho < (1.0 - vartheta) / 2.0)) {
        throw DomainError("prop41: rho must lie in [0, (1 - vartheta)/2)");
    }
    if (!(T > 0.0)) throw DomainError("prop41: T must be positive");
    if (!(kappa >= 0.0)) throw DomainError("prop41: kappa must be >= 0");
    require_nonnegative(in.xi_lp, "prop41: ||xi||_Lp");
    require_nonnegative(in.F_lip0, "prop41: ||F||_Lip0");
    require_nonnegative(in.B_lip0, "prop41: ||B||_Lip0");

    const double r = 1.0 - vartheta;
    double arg = std::pow(T, r) * std::sqrt(2.0) * in.F_lip0 / std::sqrt(r) +
                 std::sqrt(std::pow(T, r) * p * (p - 1.0)) * in.B_lip0;
    double bracket = std::pow(T, 1.0 - rho - vartheta) / (1.0 - rho - vartheta) * in.F_lip0 +
                     std::sqrt(p * (p - 1.0) * std::pow(T, 1.0 - 2.0 * rho - vartheta)) /
                         std::sqrt(2.0 - 4.0 * rho - 2.0 * vartheta) * in.B_lip0;
    double kappa_rho = rho == 0.0 ? 1.0 : std::pow(kappa, rho);
    double log_value = std::log(std::max(1.0, in.xi_lp)) + std::log(2.0) + safe_log(kappa_rho) +
                       2.0 * log_calE(r, arg) + safe_log(bracket);
    return exp_checked(log_value, "prop41");
}

double parametric_weak_bound(const ParametricInputs& in, WeakForm form, const BoundGeometry& g) {
    if (!in.c) throw DomainError("parametric bound: the six Kolmogorov constants c must be supplied");
    double c_sum = 0.0;
    for (double c : *in.c) {
        require_nonnegative(c, "parametric bound: c constant");
        c_sum += c;
    }
    require_nonnegative(in.phi_c3b, "parametric bound: ||phi||_C3b");
    require_nonnegative(in.phi_c1b, "parametric bound: ||phi||_C1b");
    require_nonnegative(in.F_c1b, "parametric bound: ||F||_C1b");
    require_nonnegative(in.B_c1b, "parametric bound: ||B||_C1b");
    require_nonnegative(in.K4, "parametric bound: K4");
    if (!(in.varsigma >= 1.0)) throw DomainError("parametric bound: varsigma must be >= 1");
    if (!(g.T > 0.0)) throw DomainError("parametric bound: T must be positive");
    if (!(g.gap > 0.0)) throw DomainError("parametric bound: gap must be positive");
    if (!(g.vartheta >= 0.0 && g.vartheta < 0.5)) throw DomainError("parametric bound: vartheta must lie in [0, 1/2)");

    const double T = g.T, rho = g.rho, v = g.vartheta, th = g.theta;
    const double phi_c = in.phi_c3b + c_sum;
    auto geometry_factor = [&] { return std::pow(1.0 + std::pow(T, 1.0 - v) / (1.0 - v - rho), 2.0); };
    auto log_calE4 = [&] {
        double arg = std::pow(T, 1.0 - th) * std::sqrt(2.0) * in.F_c1b / std::sqrt(1.0 - th) +
                     std::sqrt(12.0 * std::pow(T, 1.0 - th)) * in.B_c1b;
        return 4.0 * log_calE(1.0 - th, arg);
    };

    switch (form) {
        case WeakForm::Cor3_3: {
            if (!(rho >= 0.0 && rho < 1.0 - v)) throw DomainError("Cor3_3: rho must lie in [0, 1 - vartheta)");
            double proj = std::exp(-rho * std::log(g.gap));
            return 4.5 * std::pow(T, -rho) * geometry_factor() * proj * in.varsigma * in.K4 * phi_c;
        }
        case WeakForm::Cor3_4: {
            if (!(rho >= 0.0 && rho < 1.0 - v)) throw DomainError("Cor3_4: rho must lie in [0, 1 - vartheta)");
            if (!(th >= 0.0 && th < 1.0)) throw DomainError("Cor3_4: theta must lie in [0, 1)");
            double proj_log = -rho * std::log(g.gap);
            double log_value = std::log(18.0) - rho * std::log(T) + std::log(geometry_factor()) +
                               std::log(std::max(1.0, in.xi_moment4)) + proj_log + std::log(in.varsigma) + log_calE4() +
                               safe_log(phi_c);
            return exp_checked(log_value, "Cor3_4");
        }
        case WeakForm::Cor5_2: {
            if (!(th >= 0.0 && th < 1.0)) throw DomainError("Cor5_2: theta must lie in [0, 1)");
            if (!(v <= th)) throw DomainError("Cor5_2: vartheta must not exceed theta");
            if (!(rho > 0.0 && rho < 1.0 - th && rho > 4.0 * (th - v))) {
                throw DomainError("Cor5_2: rho must lie in (0, 1 - theta) and exceed 4 (theta - vartheta)");
            }
            double a = (std::pow(T, 1.0 - rho / 2.0 - th) * in.F_c1b / (1.0 - rho / 2.0 - th) +
                        std::sqrt(std::pow(T, 1.0 - rho - th)) * in.B_c1b / std::sqrt(1.0 - rho - th)) *
                       in.phi_c1b;
            double b = in.varsigma * std::pow(T, -rho) * geometry_factor() * phi_c;
            double log_value = std::log(22.0) + std::log(std::max(1.0, in.id_norm_minus2)) -
                               (rho - 4.0 * (th - v)) * std::log(g.gap) + safe_log(a + b) +
                               std::log(std::max(1.0, in.xi_moment4)) + log_calE4();
            return exp_checked(log_value, "Cor5_2");
        }
    }
    throw DomainError("parametric bound: unknown form");
}

KappaChoice optimize_kappa(const std::function<double(double)>& weak_bound,
                           const std::function<double(double)>& strong_bound, const std::vector<double>& grid) {
    if (grid.empty()) throw DomainError("optimize_kappa: empty kappa grid");
    KappaChoice best{0.0, std::numeric_limits<double>::infinity()};
    for (double k : grid) {
        if (!(k > 0.0 && k <= 1.0)) throw DomainError("optimize_kappa: grid points must lie in (0, 1]");
        double total = weak_bound(k) + strong_bound(k);
        if (total < best.bound || (total == best.bound && k < best.kappa)) best = {k, total};
    }
    return best;
}

MeanStderr estimate_K_moment(const SimConfig& cfg, const Model& model, std::size_t N, int r, ExecPolicy policy,
                             std::size_t slices) {
    if (r < 1 || r > 4) throw DomainError("estimate_K_moment: r must lie in 1..4");
    if (N > cfg.n_ref) throw DomainError("estimate_K_moment: N must not exceed sim.N_ref");
    if (slices < 1) throw DomainError("estimate_K_moment: need at least one time slice");
    const std::size_t stored = std::min(slices, cfg.steps);
    // Slice j (1..stored) records the state after step ceil(j * steps / stored).
    std::vector<std::size_t> slice_of_step(cfg.steps + 1, 0);
    for (std::size_t j = 1; j <= stored; ++j) slice_of_step[(j * cfg.steps + stored - 1) / stored] = j;

    const ModeSet all = ModeSet::full();
    const Stepper stepper(model, cfg.dt(), cfg.kappa, cfg.n_ref, all, N, cfg.noise_limit());
    auto g = [r](std::span<const double> y) {
        double s = 0.0;
        for (double v : y) s += v * v;
        return std::max(1.0, std::pow(std::sqrt(s), r));
    };

    auto slots = run_samples(cfg.samples, stored + 1, policy, [&](std::size_t sample, double* row) {
        std::vector<double> y(cfg.n_ref, 0.0);
        for (std::size_t n = 1; n <= std::min(cfg.n_ref, cfg.xi.dim()); ++n) y[n - 1] = cfg.xi[n - 1];
        row[0] = g(y);
        run_path(cfg, stepper, sample, y, [&](std::size_t step, std::span<const double> state) {
            if (std::size_t j = slice_of_step[step]; j > 0) row[j] = g(state);
        });
    });

    MeanStderr best;
    for (std::size_t j = 0; j <= stored; ++j) {
        auto col = slots.column(j);
        MeanStderr m = mean_stderr(col);
        if (j == 0 || m.mean > best.mean) best = m;
    }
    return best;
}

}  // namespace seelab
