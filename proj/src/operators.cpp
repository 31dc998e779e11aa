#include "seelab/operators.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "seelab/errors.hpp"

namespace seelab {

namespace {

double tanh_derivative(int k, double x) {
    double t = std::tanh(x);
    double s = 1.0 - t * t;
    switch (k) {
        case 0: return t;
        case 1: return s;
        case 2: return -2.0 * t * s;
        case 3: return (6.0 * t * t - 2.0) * s;
        case 4: return s * (16.0 * t - 24.0 * t * t * t);
        default: break;
    }
    throw DomainError("profile derivative order must lie in 0..4");
}

double inv_sqrt_derivative(int k, double x) {
    double u = 1.0 + x * x;
    double x2 = x * x;
    switch (k) {
        case 0: return 1.0 / std::sqrt(u);
        case 1: return -x * std::pow(u, -1.5);
        case 2: return (2.0 * x2 - 1.0) * std::pow(u, -2.5);
        case 3: return 3.0 * x * (3.0 - 2.0 * x2) * std::pow(u, -3.5);
        case 4: return (9.0 - 72.0 * x2 + 24.0 * x2 * x2) * std::pow(u, -4.5);
        default: break;
    }
    throw DomainError("profile derivative order must lie in 0..4");
}

// Continuous gap for power laws; integer-only lookups otherwise.
double gap_of(const Eigenstructure& eig, double x) {
    if (eig.is_power_law()) return eig.gap_at(x);
    return eig.gap(static_cast<std::size_t>(x));
}

double weight(const Eigenstructure& eig, std::size_t n, double r) { return std::exp(r * std::log(eig.gap(n))); }

// A diagonal map v_n = scale_n p(x_n) + linear x_n measured in sum_n w_n^2 v_n^2.
struct DiagonalMap {
    std::vector<double> scale;
    std::vector<double> w;
    Profile profile = Profile::Tanh;
    double linear = 0.0;
    bool zero = false;

    double entry(std::size_t i, double xi) const {
        if (zero) return 0.0;
        return scale[i] * profile_value(profile, xi) + linear * xi;
    }
    double norm_of(const std::vector<double>& v) const {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * w[i] * v[i] * v[i];
        return std::sqrt(s);
    }
};

SeminormEstimate probe(const DiagonalMap& map, int k, const DeclaredNorms& declared, const ProbeOptions& opt) {
    if (k < 0 || k > 2) throw DomainError("estimate_ckb_seminorm: k must lie in 0..2");
    SeminormEstimate out;
    if (auto it = declared.find(k); it != declared.end()) out.declared = it->second;

    const std::size_t m = map.w.size();
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> coord(-4.0, 4.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);

    std::vector<double> x(m), dir(m), v(m);
    auto eval_at = [&](double step) {
        for (std::size_t i = 0; i < m; ++i) v[i] = map.entry(i, x[i] + step * dir[i]);
        return v;
    };

    double best = 0.0;
    for (std::size_t s = 0; s < opt.samples; ++s) {
        for (double& xi : x) xi = coord(rng);
        if (k == 0) {
            best = std::max(best, map.norm_of(eval_at(0.0)));
            continue;
        }
        std::fill(dir.begin(), dir.end(), 0.0);
        if (s % 2 == 0) {
            dir[pick(rng)] = 1.0;
        } else {
            double len = 0.0;
            for (double& d : dir) {
                d = normal(rng);
                len += d * d;
            }
            for (double& d : dir) d /= std::sqrt(len);
        }
        std::vector<double> diff(m);
        if (k == 1) {
            const double h = 1e-5;
            auto plus = eval_at(h);
            auto minus = eval_at(-h);
            for (std::size_t i = 0; i < m; ++i) diff[i] = (plus[i] - minus[i]) / (2.0 * h);
        } else {
            const double h = 1e-3;
            auto plus = eval_at(h);
            auto minus = eval_at(-h);
            auto mid = eval_at(0.0);
            for (std::size_t i = 0; i < m; ++i) diff[i] = (plus[i] - 2.0 * mid[i] + minus[i]) / (h * h);
        }
        best = std::max(best, map.norm_of(diff));
    }
    out.estimate = best;
    if (out.declared) out.consistent = best <= 1.05 * *out.declared;
    return out;
}

std::size_t probe_modes(const Eigenstructure& eig, const ProbeOptions& opt) {
    std::size_t m = opt.modes;
    if (auto count = eig.mode_count()) m = std::min(m, *count);
    if (m == 0) throw DomainError("estimate_ckb_seminorm: need at least one mode");
    return m;
}

}  // namespace

double profile_derivative(Profile p, int k, double x) {
    return p == Profile::Tanh ? tanh_derivative(k, x) : inv_sqrt_derivative(k, x);
}

double profile_sup(Profile p, int k) {
    switch (k) {
        case 0: return 1.0;
        // tanh' peaks at 0; |g'| peaks at x = 1/sqrt(2) with value 2/(3 sqrt 3).
        case 1: return p == Profile::Tanh ? 1.0 : 2.0 / (3.0 * std::sqrt(3.0));
        // |tanh''| peaks where tanh = 1/sqrt(3); |g''| peaks at 0.
        case 2: return p == Profile::Tanh ? 4.0 / (3.0 * std::sqrt(3.0)) : 1.0;
        default: break;
    }
    throw DomainError("profile_sup: k must lie in 0..2");
}

void validate_drift(const DriftSpec& spec, const Eigenstructure& eig) {
    if (!(spec.theta >= 0.0 && spec.theta < 1.0)) throw DomainError("drift: theta must lie in [0, 1)");
    if (!std::isfinite(spec.linear_shift)) throw DomainError("drift: linear_shift must be finite");
    if (spec.kind == DriftSpec::Kind::Zero) {
        for (const auto& [k, v] : spec.declared_norms) {
            if (v != 0.0) throw DomainError("drift: the zero drift must declare all norms as 0");
        }
        return;
    }
    if (!std::isfinite(spec.sigma_F)) throw DomainError("drift: sigma_F must be finite");
    if (!eig.is_power_law()) return;
    ModeTerm term = [&](double x) { return std::exp((2.0 * spec.sigma_F - 2.0 * spec.theta) * std::log(gap_of(eig, x))); };
    if (!tail_converges(term)) {
        std::ostringstream msg;
        msg << "drift: sum_n (eta - lambda_n)^{-2 theta} nu_n^2 diverges for sigma_F = " << spec.sigma_F
            << ", theta = " << spec.theta << "; need sigma_F < theta - 1/(2 rho)";
        throw DomainError(msg.str());
    }
}

void validate_diffusion(const DiffusionSpec& spec, const Eigenstructure& eig) {
    if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
        throw DomainError("diffusion: amplitude must be finite and >= 0");
    }
    if (!std::isfinite(spec.delta)) throw DomainError("diffusion: delta must be finite");
    if (!(spec.half_theta >= 0.0 && spec.half_theta < 0.5)) {
        throw DomainError("diffusion: half_theta must lie in [0, 1/2)");
    }
    const PowerLaw* pl = eig.power_law_params();
    if (!pl) return;
    double limit = 0.5 - 1.0 / (2.0 * pl->rho);
    if (!(spec.delta < limit)) {
        std::ostringstream msg;
        msg << "diffusion: delta = " << spec.delta << " violates delta < 1/2 - 1/(2 rho) = " << limit
            << " for rho = " << pl->rho;
        throw DomainError(msg.str());
    }
    ModeTerm term = [&](double x) { return std::exp((2.0 * spec.delta - 2.0 * spec.half_theta) * std::log(gap_of(eig, x))); };
    if (spec.amplitude > 0.0 && !tail_converges(term)) {
        std::ostringstream msg;
        msg << "diffusion: B is not Hilbert-Schmidt into H_{-half_theta} for delta = " << spec.delta
            << ", half_theta = " << spec.half_theta << "; need half_theta > delta + 1/(2 rho)";
        throw DomainError(msg.str());
    }
}

double drift_scale(const DriftSpec& spec, const Eigenstructure& eig, std::size_t n) {
    if (spec.kind == DriftSpec::Kind::Zero) return 0.0;
    return weight(eig, n, spec.sigma_F);
}

double diffusion_scale(const DiffusionSpec& spec, const Eigenstructure& eig, std::size_t n) {
    return spec.amplitude * weight(eig, n, spec.delta);
}

SpectralVector eval_drift(const DriftSpec& spec, const Eigenstructure& eig, const SpectralVector& x,
                          const ModeSet& active) {
    SpectralVector out(x.dim());
    for (std::size_t n = 1; n <= x.dim(); ++n) {
        if (!active.contains(n)) continue;
        double v = spec.linear_shift * x[n - 1];
        if (spec.kind == DriftSpec::Kind::DiagonalNemytskii) {
            v += drift_scale(spec, eig, n) * profile_value(spec.profile, x[n - 1]);
        }
        out[n - 1] = v;
    }
    return out;
}

SpectralVector eval_diffusion_diag(const DiffusionSpec& spec, const Eigenstructure& eig, const SpectralVector& x,
                                   const ModeSet& active) {
    SpectralVector out(x.dim());
    for (std::size_t n = 1; n <= x.dim(); ++n) {
        if (!active.contains(n)) continue;
        double mu = diffusion_scale(spec, eig, n);
        out[n - 1] = spec.kind == DiffusionSpec::Kind::AdditiveDiagonal ? mu : mu * profile_value(spec.profile, x[n - 1]);
    }
    return out;
}

HsNorm hs_norm(const DiffusionSpec& spec, const SpectralVector& x, double r, const Eigenstructure& eig,
               std::size_t n_max) {
    if (n_max < x.dim()) throw DomainError("hs_norm: n_max must be >= x.dim()");
    if (auto count = eig.mode_count(); count && n_max > *count) {
        throw DomainError("hs_norm: n_max exceeds the explicit spectrum size");
    }
    HsNorm out;
    // Beyond the state the coordinates are zero, so beta_n = mu_n p(0).
    double p0 = spec.kind == DiffusionSpec::Kind::AdditiveDiagonal ? 1.0 : profile_value(spec.profile, 0.0);
    auto beta = eval_diffusion_diag(spec, eig, x, ModeSet::full());
    double sum = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        double b = n <= x.dim() ? beta[n - 1] : diffusion_scale(spec, eig, n) * p0;
        sum += std::exp(2.0 * r * std::log(eig.gap(n))) * b * b;
    }
    if (!std::isfinite(sum)) throw NumericalError("hs_norm: truncated sum overflows");
    out.truncated = std::sqrt(sum);

    double amp2 = spec.amplitude * spec.amplitude * p0 * p0;
    if (amp2 > 0.0) {
        double e = 2.0 * r + 2.0 * spec.delta;
        ModeTerm term = [&](double m) { return amp2 * std::exp(e * std::log(gap_of(eig, m))); };
        ModeSumOptions options;
        const PowerLaw* pl = eig.power_law_params();
        if (pl && eig.eta() + pl->offset == 0.0 && pl->rho * e < -1.0) {
            // gap = c x^rho exactly, so the tail integral has a closed form.
            double c = pl->c, rho = pl->rho;
            options.integral = [=](double a) {
                double p = rho * e + 1.0;
                return amp2 * std::exp(e * std::log(c) + p * std::log(a)) / (-p);
            };
        }
        out.tail_sq = certified_mode_sum(eig, ModeSet::prefix(n_max).complement(), term, options);
    }
    out.value = std::sqrt(sum + out.tail_sq.value);
    return out;
}

SpectralVector mollify(const SpectralVector& y, double kappa, const Eigenstructure& eig) {
    if (!(kappa >= 0.0)) throw DomainError("mollify: kappa must be >= 0");
    if (kappa == 0.0) return y;
    return semigroup_apply(y, kappa, eig);
}

ShiftedSystem shift_system(const Eigenstructure& eig, const DriftSpec& drift) {
    DriftSpec shifted = drift;
    shifted.linear_shift += eig.eta();
    return {eig.shifted(0.0, -eig.eta()), shifted};
}

SeminormEstimate estimate_ckb_seminorm(const DriftSpec& spec, const Eigenstructure& eig, int k,
                                       const ProbeOptions& options) {
    std::size_t m = probe_modes(eig, options);
    DiagonalMap map;
    map.profile = spec.profile;
    map.linear = spec.linear_shift;
    map.zero = spec.kind == DriftSpec::Kind::Zero && spec.linear_shift == 0.0;
    for (std::size_t n = 1; n <= m; ++n) {
        map.scale.push_back(drift_scale(spec, eig, n));
        map.w.push_back(weight(eig, n, -spec.theta));
    }
    return probe(map, k, spec.declared_norms, options);
}

SeminormEstimate estimate_ckb_seminorm(const DiffusionSpec& spec, const Eigenstructure& eig, int k,
                                       const ProbeOptions& options) {
    std::size_t m = probe_modes(eig, options);
    DiagonalMap map;
    map.profile = spec.profile;
    for (std::size_t n = 1; n <= m; ++n) {
        double mu = diffusion_scale(spec, eig, n);
        map.scale.push_back(mu);
        map.w.push_back(weight(eig, n, -spec.half_theta));
    }
    if (spec.kind == DiffusionSpec::Kind::AdditiveDiagonal) {
        // Constant in the state: only the zeroth seminorm is nonzero.
        if (k > 0) {
            SeminormEstimate out;
            if (auto it = spec.declared_norms.find(k); it != spec.declared_norms.end()) out.declared = it->second;
            return out;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += map.w[i] * map.w[i] * map.scale[i] * map.scale[i];
        SeminormEstimate out;
        out.estimate = std::sqrt(s);
        if (auto it = spec.declared_norms.find(0); it != spec.declared_norms.end()) {
            out.declared = it->second;
            out.consistent = out.estimate <= 1.05 * it->second;
        }
        return out;
    }
    return probe(map, k, spec.declared_norms, options);
}

namespace {

// sup_n (eta - lambda_n)^e.
double sup_gap_power(const Eigenstructure& eig, double e) {
    if (auto count = eig.mode_count()) {
        double best = 0.0;
        for (std::size_t n = 1; n <= *count; ++n) best = std::max(best, std::exp(e * std::log(eig.gap(n))));
        return best;
    }
    // Power-law gaps increase in n.
    if (e > 0.0) return std::numeric_limits<double>::infinity();
    return std::exp(e * std::log(eig.gap(1)));
}

}  // namespace

double drift_lip0_norm(const DriftSpec& spec, const Eigenstructure& eig, double vartheta) {
    double lip = std::abs(spec.linear_shift) * sup_gap_power(eig, -vartheta);
    if (spec.kind == DriftSpec::Kind::Zero) return lip;
    lip += profile_sup(spec.profile, 1) * sup_gap_power(eig, spec.sigma_F - vartheta);
    double at_zero = 0.0;
    if (double p0 = profile_value(spec.profile, 0.0); p0 != 0.0) {
        ModeTerm term = [&](double x) { return p0 * p0 * std::exp((2.0 * spec.sigma_F - 2.0 * vartheta) * std::log(gap_of(eig, x))); };
        at_zero = std::sqrt(certified_mode_sum(eig, ModeSet::full(), term).hi);
    }
    return at_zero + lip;
}

double diffusion_lip0_norm(const DiffusionSpec& spec, const Eigenstructure& eig, double vartheta) {
    DiffusionSpec probe = spec;
    probe.half_theta = vartheta / 2.0;
    HsNorm at_zero = hs_norm(probe, SpectralVector(1), -vartheta / 2.0, eig, 1);
    double value = std::sqrt(at_zero.truncated * at_zero.truncated + at_zero.tail_sq.hi);
    if (spec.kind == DiffusionSpec::Kind::DiagonalNemytskii) {
        value += spec.amplitude * profile_sup(spec.profile, 1) * sup_gap_power(eig, spec.delta - vartheta / 2.0);
    }
    return value;
}

}  // namespace seelab
