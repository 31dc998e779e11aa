#include "seelab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seelab/errors.hpp"
#include "seelab/noise.hpp"
#include "seelab/parallel.hpp"

namespace seelab {

namespace {

double mollifier(const Eigenstructure& eig, std::size_t n, double kappa) {
    return kappa == 0.0 ? 1.0 : std::exp(eig.lambda(n) * kappa);
}

std::vector<double> initial_state(const SimConfig& cfg, std::size_t dim, const ModeSet& active) {
    std::vector<double> x(dim, 0.0);
    for (std::size_t n = 1; n <= std::min(dim, cfg.xi.dim()); ++n) {
        if (active.contains(n)) x[n - 1] = cfg.xi[n - 1];
    }
    return x;
}

void check_finite(std::span<const double> x, std::size_t step, std::size_t sample) {
    double acc = 0.0;
    for (double v : x) acc += v * 0.0;
    if (acc == 0.0) return;
    std::ostringstream msg;
    msg << "non-finite state after time step " << step << " of sample " << sample;
    throw NumericalError(msg.str());
}

}  // namespace

void validate_model(const Model& model) {
    validate_drift(model.drift, model.eig);
    validate_diffusion(model.diffusion, model.eig);
}

bool is_additive_linear(const Model& model) {
    return model.drift.kind == DriftSpec::Kind::Zero &&
           model.diffusion.kind == DiffusionSpec::Kind::AdditiveDiagonal;
}

void validate_sim_config(const SimConfig& cfg, const Model& model) {
    auto fail = [](const std::string& what) { throw DomainError(what); };
    if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) fail("sim.T must be positive and finite");
    if (cfg.steps < 1) fail("sim.steps must be >= 1");
    if (cfg.n_galerkin < 1) fail("sim.N must be >= 1");
    if (cfg.n_ref < cfg.n_galerkin) fail("sim.N_ref must be >= the Galerkin size");
    if (cfg.noise_modes > cfg.n_ref) fail("sim.noise_modes must not exceed sim.N_ref");
    if (!(cfg.kappa >= 0.0) || !std::isfinite(cfg.kappa)) fail("sim.kappa must be finite and >= 0");
    if (cfg.samples < 1) fail("sim.samples must be >= 1");
    if (cfg.xi.dim() > cfg.n_ref) fail("sim.xi has more modes than sim.N_ref");
    if (auto count = model.eig.mode_count(); count && cfg.n_ref > *count) {
        fail("sim.N_ref exceeds the number of explicit eigenvalues");
    }
    if (cfg.scheme == Scheme::ExactOU && !is_additive_linear(model)) {
        fail("sim.scheme = exact_ou requires drift.kind = zero and diffusion.kind = additive");
    }
}

std::vector<std::string> sim_config_warnings(const SimConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.n_ref < 4 * cfg.n_galerkin) {
        std::ostringstream msg;
        msg << "sim.N_ref = " << cfg.n_ref << " is below 4 x Galerkin size " << cfg.n_galerkin
            << "; the reference solution may be under-resolved";
        out.push_back(msg.str());
    }
    return out;
}

Stepper::Stepper(const Model& model, double dt, double kappa, std::size_t dim, const ModeSet& active,
                 std::size_t n_input, std::size_t noise_modes)
    : dim_(dim),
      drift_profile_(model.drift.profile),
      diffusion_profile_(model.diffusion.profile),
      has_drift_(model.drift.kind == DriftSpec::Kind::DiagonalNemytskii),
      additive_(model.diffusion.kind == DiffusionSpec::Kind::AdditiveDiagonal) {
    if (!(dt > 0.0)) throw DomainError("stepper: dt must be positive");
    if (!(kappa >= 0.0)) throw DomainError("stepper: kappa must be >= 0");
    const Eigenstructure& eig = model.eig;
    const double p_f0 = has_drift_ ? profile_value(drift_profile_, 0.0) : 0.0;
    const double p_b0 = additive_ ? 1.0 : profile_value(diffusion_profile_, 0.0);

    for (std::size_t n = 1; n <= dim; ++n) {
        if (!active.contains(n)) continue;
        const double mk = mollifier(eig, n, kappa);
        const double nu = drift_scale(model.drift, eig, n);
        const double mu = diffusion_scale(model.diffusion, eig, n);
        const bool noisy = n <= noise_modes;
        if (noisy) noise_span_ = n;
        if (n <= n_input) {
            const double rate = eig.lambda(n) + model.drift.linear_shift * mk;
            const double decay = std::exp(rate * dt);
            fed_.push_back(n - 1);
            fed_decay_.push_back(decay);
            fed_drift_.push_back(decay * dt * mk * nu);
            fed_noise_.push_back(noisy ? mk * mu * std::sqrt(exp_variance_factor(rate, dt)) : 0.0);
        } else {
            const double rate = eig.lambda(n);
            const double decay = std::exp(rate * dt);
            frozen_.push_back(n - 1);
            frozen_decay_.push_back(decay);
            frozen_shift_.push_back(decay * dt * mk * nu * p_f0);
            frozen_noise_.push_back(noisy ? mk * mu * p_b0 * std::sqrt(exp_variance_factor(rate, dt)) : 0.0);
        }
    }
}

void Stepper::step(std::span<double> x, std::span<const double> z) const {
    const std::size_t nf = fed_.size();
    if (!has_drift_ && additive_) {
        for (std::size_t i = 0; i < nf; ++i) {
            const std::size_t s = fed_[i];
            x[s] = fed_decay_[i] * x[s] + fed_noise_[i] * z[s];
        }
    } else {
        for (std::size_t i = 0; i < nf; ++i) {
            const std::size_t s = fed_[i];
            const double xn = x[s];
            double v = fed_decay_[i] * xn;
            if (has_drift_) v += fed_drift_[i] * profile_value(drift_profile_, xn);
            const double b = additive_ ? fed_noise_[i] : fed_noise_[i] * profile_value(diffusion_profile_, xn);
            x[s] = v + b * z[s];
        }
    }
    for (std::size_t i = 0; i < frozen_.size(); ++i) {
        const std::size_t s = frozen_[i];
        x[s] = frozen_decay_[i] * x[s] + frozen_shift_[i] + frozen_noise_[i] * z[s];
    }
}

SpectralVector step_exp_euler(const SpectralVector& x, double dt, const Model& model, double kappa,
                              const ModeSet& active, std::span<const double> normals) {
    if (!(dt > 0.0)) throw DomainError("step_exp_euler: dt must be positive");
    if (normals.size() < x.dim()) throw DomainError("step_exp_euler: one normal per mode is required");
    const Eigenstructure& eig = model.eig;
    DriftSpec nonlinear = model.drift;
    nonlinear.linear_shift = 0.0;
    SpectralVector f = mollify(eval_drift(nonlinear, eig, x, active), kappa, eig);
    SpectralVector beta = mollify(eval_diffusion_diag(model.diffusion, eig, x, active), kappa, eig);
    SpectralVector out(x.dim());
    for (std::size_t n = 1; n <= x.dim(); ++n) {
        if (!active.contains(n)) continue;
        double rate = eig.lambda(n) + model.drift.linear_shift * mollifier(eig, n, kappa);
        double decay = std::exp(rate * dt);
        out[n - 1] = decay * (x[n - 1] + dt * f[n - 1]) +
                     beta[n - 1] * std::sqrt(exp_variance_factor(rate, dt)) * normals[n - 1];
    }
    return out;
}

void run_path(const SimConfig& cfg, const Stepper& stepper, std::size_t sample, std::span<double> state,
              const PathObserver& observer, std::optional<std::uint64_t> seed_override) {
    const std::uint64_t seed = seed_override.value_or(cfg.seed);
    std::vector<double> z(stepper.dim(), 0.0);
    for (std::size_t k = 0; k < cfg.steps; ++k) {
        fill_gaussians(seed, sample, k, 1, stepper.noise_span(), z.data());
        stepper.step(state, z);
        check_finite(state, k + 1, sample);
        if (observer) observer(k + 1, state);
    }
}

SpectralVector simulate_galerkin(const SimConfig& cfg, const Model& model, const ModeSet& I, std::size_t sample) {
    if (cfg.scheme == Scheme::ExactOU) return simulate_exact_ou(cfg, model, I, sample);
    Stepper stepper(model, cfg.dt(), cfg.kappa, cfg.n_ref, I, cfg.n_ref, cfg.noise_limit());
    auto x = initial_state(cfg, cfg.n_ref, I);
    run_path(cfg, stepper, sample, x);
    return SpectralVector(std::move(x));
}

SpectralVector simulate_modified(const SimConfig& cfg, const Model& model, std::size_t N, std::size_t sample) {
    if (N > cfg.n_ref) throw DomainError("simulate_modified: N must not exceed sim.N_ref");
    ModeSet all = ModeSet::full();
    Stepper stepper(model, cfg.dt(), cfg.kappa, cfg.n_ref, all, N, cfg.noise_limit());
    auto y = initial_state(cfg, cfg.n_ref, all);
    run_path(cfg, stepper, sample, y);
    return SpectralVector(std::move(y));
}

SpectralVector simulate_exact_ou(const SimConfig& cfg, const Model& model, const ModeSet& I, std::size_t sample) {
    if (!is_additive_linear(model)) {
        throw DomainError("simulate_exact_ou requires zero drift and additive diffusion");
    }
    if (!(cfg.T >= 0.0)) throw DomainError("simulate_exact_ou: T must be >= 0");
    const Eigenstructure& eig = model.eig;
    std::vector<double> z(cfg.n_ref, 0.0);
    fill_gaussians(cfg.seed, sample, 0, 1, std::min(cfg.n_ref, cfg.noise_limit()), z.data());
    auto x = initial_state(cfg, cfg.n_ref, I);
    for (std::size_t n = 1; n <= cfg.n_ref; ++n) {
        if (!I.contains(n)) continue;
        double mk = mollifier(eig, n, cfg.kappa);
        double rate = eig.lambda(n) + model.drift.linear_shift * mk;
        double sd = mk * diffusion_scale(model.diffusion, eig, n) * std::sqrt(exp_variance_factor(rate, cfg.T));
        x[n - 1] = std::exp(rate * cfg.T) * x[n - 1] + sd * z[n - 1];
    }
    return SpectralVector(std::move(x));
}

double verify_projection_identity(const SimConfig& cfg, const Model& model, std::size_t N,
                                  std::optional<std::uint64_t> desync_seed) {
    if (N < 1 || N > cfg.n_ref) throw DomainError("identity check: N must lie in 1..sim.N_ref");
    const ModeSet first_n = ModeSet::prefix(N);
    const ModeSet all = ModeSet::full();
    const Stepper galerkin(model, cfg.dt(), cfg.kappa, N, first_n, N, cfg.noise_limit());
    const Stepper modified(model, cfg.dt(), cfg.kappa, cfg.n_ref, all, N, cfg.noise_limit());
    const std::uint64_t y_seed = desync_seed.value_or(cfg.seed);

    auto slots = run_samples(cfg.samples, 1, ExecPolicy::Parallel, [&](std::size_t sample, double* row) {
        auto x = initial_state(cfg, N, first_n);
        auto y = initial_state(cfg, cfg.n_ref, all);
        std::vector<double> zx(N, 0.0), zy(cfg.n_ref, 0.0);
        double worst = 0.0;
        for (std::size_t k = 0; k < cfg.steps; ++k) {
            fill_gaussians(cfg.seed, sample, k, 1, galerkin.noise_span(), zx.data());
            fill_gaussians(y_seed, sample, k, 1, modified.noise_span(), zy.data());
            galerkin.step(x, zx);
            modified.step(y, zy);
            check_finite(x, k + 1, sample);
            check_finite(y, k + 1, sample);
            double d2 = 0.0;
            for (std::size_t i = 0; i < N; ++i) d2 += (y[i] - x[i]) * (y[i] - x[i]);
            worst = std::max(worst, std::sqrt(d2));
        }
        row[0] = worst;
    });
    auto col = slots.column(0);
    return *std::max_element(col.begin(), col.end());
}

}  // namespace seelab
