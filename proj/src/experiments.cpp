#include "seelab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "seelab/errors.hpp"
#include "seelab/noise.hpp"

namespace seelab {

namespace {

// Seed offset for the independent-path estimator.
constexpr std::uint64_t kIndependentStream = 0xA5A5A5A5DEADBEEFULL;

// Terminal state on modes 1..dim of the Galerkin scheme (or the exact OU sampler).
class TerminalSampler {
public:
    TerminalSampler(const SimConfig& cfg, const Model& model, std::size_t dim, double kappa)
        : cfg_(cfg), model_(model), dim_(dim) {
        cfg_.kappa = kappa;
        if (cfg.scheme == Scheme::ExpEuler) {
            stepper_.emplace(model, cfg.dt(), kappa, dim, ModeSet::full(), dim, cfg.noise_limit());
        }
    }

    void sample(std::size_t s, std::uint64_t seed, std::vector<double>& x) const {
        if (!stepper_) {
            SimConfig local = cfg_;
            local.seed = seed;
            auto v = simulate_exact_ou(local, model_, ModeSet::prefix(dim_), s).values();
            x.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(dim_));
            return;
        }
        x.assign(dim_, 0.0);
        for (std::size_t n = 1; n <= std::min(dim_, cfg_.xi.dim()); ++n) x[n - 1] = cfg_.xi[n - 1];
        run_path(cfg_, *stepper_, s, x, {}, seed);
    }

private:
    SimConfig cfg_;
    const Model& model_;
    std::size_t dim_;
    std::optional<Stepper> stepper_;
};

// Prefix sums of x_n^2: head[N] = sum_{n <= N} x_n^2.
std::vector<double> prefix_squares(const std::vector<double>& x) {
    std::vector<double> head(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) head[i + 1] = head[i] + x[i] * x[i];
    return head;
}

double phi_of_sqnorm(Phi phi, double sq) { return phi == Phi::SqNorm ? sq : std::exp(-sq); }

void check_levels(const SimConfig& cfg, std::size_t n_coarse, std::size_t n_fine) {
    if (n_coarse < 1 || n_coarse > n_fine) throw DomainError("coupled error: need 1 <= N_coarse <= N_fine");
    if (n_fine > cfg.n_ref) throw DomainError("coupled error: N_fine must not exceed sim.N_ref");
}

void check_n_list(const std::vector<std::size_t>& n_list, std::size_t limit) {
    if (n_list.empty()) throw DomainError("sweep: galerkin.N_list is empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw DomainError("sweep: galerkin.N_list entries must be >= 1");
        if (i > 0 && n_list[i] <= n_list[i - 1]) throw DomainError("sweep: galerkin.N_list must be strictly ascending");
    }
    if (limit > 0 && n_list.back() > limit) throw DomainError("sweep: largest N exceeds sim.N_ref");
}

double sweep_gap(const Eigenstructure& eig, std::size_t N) { return complement_gap(ModeSet::prefix(N), eig); }

MeanStderr sqrt_delta_method(const MeanStderr& m) {
    double root = std::sqrt(std::max(0.0, m.mean));
    return {root, root > 0.0 ? m.std_error / (2.0 * root) : 0.0};
}

// Per-sample rows for a Monte Carlo sweep: [phi(ref) - phi(N_i)] then ||X^ref - X^{N_i}||^2.
McSlots sweep_slots(const SimConfig& cfg, const Model& model, Phi phi, const std::vector<std::size_t>& n_list,
                    ExecPolicy policy) {
    const std::size_t k = n_list.size();
    TerminalSampler sampler(cfg, model, cfg.n_ref, cfg.kappa);
    return run_samples(cfg.samples, 2 * k, policy, [&](std::size_t s, double* row) {
        std::vector<double> x;
        sampler.sample(s, cfg.seed, x);
        auto head = prefix_squares(x);
        double full = head.back();
        for (std::size_t i = 0; i < k; ++i) {
            double coarse = head[n_list[i]];
            row[i] = phi_of_sqnorm(phi, full) - phi_of_sqnorm(phi, coarse);
            row[k + i] = full - coarse;
        }
    });
}

}  // namespace

double phi_value(Phi phi, std::span<const double> x) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    return phi_of_sqnorm(phi, sq);
}

MeanStderr mc_weak_error(const SimConfig& cfg, const Model& model, Phi phi, std::size_t n_coarse,
                         std::size_t n_fine, Coupling coupling, ExecPolicy policy) {
    check_levels(cfg, n_coarse, n_fine);
    TerminalSampler fine(cfg, model, n_fine, cfg.kappa);
    TerminalSampler coarse(cfg, model, n_coarse, cfg.kappa);
    const std::uint64_t coarse_seed = coupling == Coupling::Common ? cfg.seed : cfg.seed ^ kIndependentStream;
    auto slots = run_samples(cfg.samples, 1, policy, [&](std::size_t s, double* row) {
        std::vector<double> xf, xc;
        fine.sample(s, cfg.seed, xf);
        coarse.sample(s, coarse_seed, xc);
        row[0] = phi_value(phi, xf) - phi_value(phi, xc);
    });
    return mean_stderr(slots.column(0));
}

MeanStderr mc_strong_error(const SimConfig& cfg, const Model& model, std::size_t n_coarse, std::size_t n_fine,
                           ExecPolicy policy) {
    check_levels(cfg, n_coarse, n_fine);
    TerminalSampler fine(cfg, model, n_fine, cfg.kappa);
    TerminalSampler coarse(cfg, model, n_coarse, cfg.kappa);
    auto slots = run_samples(cfg.samples, 1, policy, [&](std::size_t s, double* row) {
        std::vector<double> xf, xc;
        fine.sample(s, cfg.seed, xf);
        coarse.sample(s, cfg.seed, xc);
        double d = 0.0;
        for (std::size_t i = 0; i < xf.size(); ++i) {
            double c = i < xc.size() ? xc[i] : 0.0;
            d += (xf[i] - c) * (xf[i] - c);
        }
        row[0] = d;
    });
    return sqrt_delta_method(mean_stderr(slots.column(0)));
}

OUSetup ou_setup_of(const Model& model, double T, double tail_tol) {
    if (!is_additive_linear(model)) throw DomainError("oracle mode requires drift.kind = zero and additive diffusion");
    if (model.drift.linear_shift != 0.0) throw DomainError("oracle mode requires an unshifted drift");
    return OUSetup{model.eig, model.diffusion.delta, T, tail_tol, model.diffusion.amplitude};
}

ErrorCurve weak_sweep(const SimConfig& cfg, const Model& model, Phi phi, const std::vector<std::size_t>& n_list,
                      SweepMode mode, double tail_tol, ExecPolicy policy) {
    ErrorCurve curve;
    if (mode == SweepMode::Oracle) {
        check_n_list(n_list, 0);
        OUSetup setup = ou_setup_of(model, cfg.T, tail_tol);
        for (std::size_t N : n_list) {
            ModeSet I = ModeSet::prefix(N);
            Certified e = phi == Phi::SqNorm ? sqnorm_weak_error_exact(setup, I) : exp_weak_error_exact(setup, I);
            curve.points.push_back({N, sweep_gap(model.eig, N), e.value, 0.0, 0, 0.0, cfg.kappa});
        }
        return curve;
    }
    check_n_list(n_list, cfg.n_ref);
    auto slots = sweep_slots(cfg, model, phi, n_list, policy);
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        MeanStderr m = mean_stderr(slots.column(i));
        curve.points.push_back(
            {n_list[i], sweep_gap(model.eig, n_list[i]), std::abs(m.mean), m.std_error, cfg.samples, cfg.dt(), cfg.kappa});
    }
    return curve;
}

ErrorCurve strong_sweep(const SimConfig& cfg, const Model& model, const std::vector<std::size_t>& n_list,
                        SweepMode mode, double tail_tol, ExecPolicy policy) {
    ErrorCurve curve;
    if (mode == SweepMode::Oracle) {
        check_n_list(n_list, 0);
        OUSetup setup = ou_setup_of(model, cfg.T, tail_tol);
        for (std::size_t N : n_list) {
            Certified e = sqnorm_weak_error_exact(setup, ModeSet::prefix(N));
            curve.points.push_back({N, sweep_gap(model.eig, N), std::sqrt(e.value), 0.0, 0, 0.0, cfg.kappa});
        }
        return curve;
    }
    check_n_list(n_list, cfg.n_ref);
    const std::size_t k = n_list.size();
    auto slots = sweep_slots(cfg, model, Phi::SqNorm, n_list, policy);
    for (std::size_t i = 0; i < k; ++i) {
        MeanStderr m = sqrt_delta_method(mean_stderr(slots.column(k + i)));
        curve.points.push_back(
            {n_list[i], sweep_gap(model.eig, n_list[i]), m.mean, m.std_error, cfg.samples, cfg.dt(), cfg.kappa});
    }
    return curve;
}

RateFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("fit: x and y differ in length");
    if (x.size() < 3) throw DomainError("fit: need at least 3 points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0)) throw DomainError("fit: abscissae must be positive");
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
            std::ostringstream msg;
            msg << "fit: error value " << y[i] << " at point " << i
                << " is not positive; increase sim.samples so the estimate resolves the error";
            throw DomainError(msg.str());
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double dn = static_cast<double>(n);
    double mx = pairwise_sum(lx) / dn, my = pairwise_sum(ly) / dn;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx == 0.0) throw DomainError("fit: all abscissae coincide");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        sse += r * r;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - sse / syy, 0.0, 1.0);
    fit.slope_stderr = std::sqrt(sse / (dn - 2.0) / sxx);
    fit.points_used = n;
    return fit;
}

RateFit fit_rate(const ErrorCurve& curve, std::size_t drop_first) {
    if (curve.points.size() < drop_first + 3) {
        std::ostringstream msg;
        msg << "fit_rate: " << curve.points.size() << " points with drop_first = " << drop_first
            << " leave fewer than 3";
        throw DomainError(msg.str());
    }
    std::vector<double> x, y;
    for (std::size_t i = drop_first; i < curve.points.size(); ++i) {
        x.push_back(curve.points[i].gap);
        y.push_back(curve.points[i].error);
    }
    return fit_power_law(x, y);
}

MollificationCurve mollification_sweep(const SimConfig& cfg, const Model& model, const std::vector<double>& kappas,
                                       const MollBoundParams& bound, ExecPolicy policy) {
    if (kappas.empty()) throw DomainError("mollification sweep: moll.kappa_list is empty");
    for (double k : kappas) {
        if (!(k > 0.0 && k <= 1.0)) throw DomainError("mollification sweep: kappas must lie in (0, 1]");
    }
    if (model.eig.eta() != 0.0) throw DomainError("mollification sweep: requires eta = 0 (apply shift_system first)");
    const std::size_t k = kappas.size();
    TerminalSampler plain(cfg, model, cfg.n_ref, 0.0);
    std::vector<TerminalSampler> mollified;
    mollified.reserve(k);
    for (double kappa : kappas) mollified.emplace_back(cfg, model, cfg.n_ref, kappa);

    auto slots = run_samples(cfg.samples, k, policy, [&](std::size_t s, double* row) {
        std::vector<double> x0, xk;
        plain.sample(s, cfg.seed, x0);
        for (std::size_t j = 0; j < k; ++j) {
            mollified[j].sample(s, cfg.seed, xk);
            double d = 0.0;
            for (std::size_t i = 0; i < x0.size(); ++i) d += (x0[i] - xk[i]) * (x0[i] - xk[i]);
            row[j] = d;
        }
    });

    Prop41Inputs inputs;
    double xi_sq = 0.0;
    for (double v : cfg.xi.values()) xi_sq += v * v;
    inputs.xi_lp = std::sqrt(xi_sq);
    inputs.F_lip0 = drift_lip0_norm(model.drift, model.eig, bound.vartheta);
    inputs.B_lip0 = diffusion_lip0_norm(model.diffusion, model.eig, bound.vartheta);

    MollificationCurve out;
    const double gap = sweep_gap(model.eig, cfg.n_ref);
    for (std::size_t j = 0; j < k; ++j) {
        MeanStderr m = sqrt_delta_method(mean_stderr(slots.column(j)));
        out.curve.points.push_back({cfg.n_ref, gap, m.mean, m.std_error, cfg.samples, cfg.dt(), kappas[j]});
        out.bounds.push_back(prop41_strong_moll_bound(inputs, bound.p, bound.vartheta, bound.rho, cfg.T, kappas[j]));
    }
    return out;
}

RateRatio twice_rate_report(const RateFit& weak, const RateFit& strong) {
    RateRatio out;
    std::ostringstream note;
    note << std::setprecision(4);
    if (!(weak.slope < 0.0 && strong.slope < 0.0)) {
        out.ratio = std::numeric_limits<double>::quiet_NaN();
        note << "ratio undefined: both slopes must be negative (weak " << weak.slope << ", strong " << strong.slope
             << ")";
        out.note = note.str();
        return out;
    }
    out.ratio = weak.slope / strong.slope;
    out.ratio_stderr = std::abs(out.ratio) * std::hypot(weak.slope_stderr / weak.slope, strong.slope_stderr / strong.slope);
    double slack = std::max(2.0 * out.ratio_stderr, 1e-12);
    out.consistent_with_two = std::abs(out.ratio - 2.0) <= slack;
    note << "weak/strong slope ratio " << out.ratio << " +- " << out.ratio_stderr
         << (out.consistent_with_two ? ": consistent with 2" : ": not consistent with 2 within 2 stderr");
    out.note = note.str();
    return out;
}

MeanStderr temporal_bias(const SimConfig& cfg, const Model& model, Phi phi, std::size_t N, ExecPolicy policy) {
    if (N < 1 || N > cfg.n_ref) throw DomainError("temporal_bias: N must lie in 1..sim.N_ref");
    const std::size_t dim = cfg.n_ref;
    const ModeSet all = ModeSet::full();
    const Stepper coarse(model, cfg.dt(), cfg.kappa, dim, all, dim, cfg.noise_limit());
    const Stepper fine(model, cfg.dt() / 2.0, cfg.kappa, dim, all, dim, cfg.noise_limit());
    const std::size_t span = coarse.noise_span();

    auto slots = run_samples(cfg.samples, 1, policy, [&](std::size_t s, double* row) {
        std::vector<double> xc(dim, 0.0), xf(dim, 0.0);
        for (std::size_t n = 1; n <= std::min(dim, cfg.xi.dim()); ++n) xc[n - 1] = xf[n - 1] = cfg.xi[n - 1];
        std::vector<double> z1(dim, 0.0), z2(dim, 0.0), zc(dim, 0.0);
        for (std::size_t k = 0; k < cfg.steps; ++k) {
            fill_gaussians(cfg.seed, s, 2 * k, 1, span, z1.data());
            fill_gaussians(cfg.seed, s, 2 * k + 1, 1, span, z2.data());
            for (std::size_t i = 0; i < span; ++i) zc[i] = (z1[i] + z2[i]) * std::numbers::sqrt2 / 2.0;
            fine.step(xf, z1);
            fine.step(xf, z2);
            coarse.step(xc, zc);
        }
        auto hc = prefix_squares(xc), hf = prefix_squares(xf);
        double dc = phi_of_sqnorm(phi, hc.back()) - phi_of_sqnorm(phi, hc[N]);
        double df = phi_of_sqnorm(phi, hf.back()) - phi_of_sqnorm(phi, hf[N]);
        row[0] = dc - df;
    });
    return mean_stderr(slots.column(0));
}

}  // namespace seelab
