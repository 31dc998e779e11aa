#pragma once

// Path generation for the spectral Galerkin scheme and the modified process.
//
// One time step on mode n reads
//   x+_n = e^{r_n dt} (x_n + dt F_n) + beta_n sqrt(int_0^dt e^{2 r_n s} ds) Z_n,
// where F_n, beta_n are the mollified coefficients at the coefficient input and
// r_n = lambda_n + linear_shift e^{kappa lambda_n} carries the linear part of the
// drift exactly. Z_n comes from the counter-based stream (seed, sample, step, n).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seelab/operators.hpp"
#include "seelab/spectral_space.hpp"

namespace seelab {

enum class Scheme { ExpEuler, ExactOU };

struct Model {
    Eigenstructure eig;
    DriftSpec drift;
    DiffusionSpec diffusion;
};

void validate_model(const Model& model);
/// Zero nonlinear drift and additive diffusion: every mode is an OU process.
bool is_additive_linear(const Model& model);

struct SimConfig {
    double T = 1.0;
    std::size_t steps = 1;
    std::size_t n_galerkin = 1;
    std::size_t n_ref = 1;
    /// Modes above this index receive no noise; 0 means n_ref.
    std::size_t noise_modes = 0;
    double kappa = 0.0;
    std::size_t samples = 1;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::ExpEuler;
    /// Initial value; zero when empty.
    SpectralVector xi;

    double dt() const { return T / static_cast<double>(steps); }
    std::size_t noise_limit() const { return noise_modes == 0 ? n_ref : noise_modes; }
};

/// Throws DomainError naming the offending field.
void validate_sim_config(const SimConfig& cfg, const Model& model);
/// Non-fatal advice, e.g. n_ref < 4 n_galerkin.
std::vector<std::string> sim_config_warnings(const SimConfig& cfg);

/// Table-driven stepper over modes 1..dim.
///
/// Active modes n <= n_input see the state as coefficient input; active modes
/// above n_input see zero (coefficients at the projected state). Inactive modes
/// stay at zero.
class Stepper {
public:
    Stepper(const Model& model, double dt, double kappa, std::size_t dim, const ModeSet& active, std::size_t n_input,
            std::size_t noise_modes);

    std::size_t dim() const { return dim_; }
    /// Number of leading modes whose normals the step reads.
    std::size_t noise_span() const { return noise_span_; }
    /// z[n-1] is the standard normal for mode n.
    void step(std::span<double> x, std::span<const double> z) const;

private:
    std::size_t dim_ = 0;
    std::size_t noise_span_ = 0;
    Profile drift_profile_ = Profile::Tanh;
    Profile diffusion_profile_ = Profile::InvSqrt1px2;
    bool has_drift_ = false;
    bool additive_ = true;

    // State-fed modes.
    std::vector<std::size_t> fed_;
    std::vector<double> fed_decay_, fed_drift_, fed_noise_;
    // Zero-fed modes: x+ = decay x + shift + noise z.
    std::vector<std::size_t> frozen_;
    std::vector<double> frozen_decay_, frozen_shift_, frozen_noise_;
};

/// Reference single step built from eval_drift / eval_diffusion_diag / mollify.
/// `normals[n-1]` is the standard normal for mode n; modes outside `active` are zeroed.
SpectralVector step_exp_euler(const SpectralVector& x, double dt, const Model& model, double kappa,
                              const ModeSet& active, std::span<const double> normals);

using PathObserver = std::function<void(std::size_t step, std::span<const double> state)>;

/// Advances `state` through cfg.steps steps of `stepper` for one sample.
/// The observer sees the state after every step. Throws NumericalError naming
/// the step and sample on a non-finite state.
void run_path(const SimConfig& cfg, const Stepper& stepper, std::size_t sample, std::span<double> state,
              const PathObserver& observer = {}, std::optional<std::uint64_t> seed_override = {});

/// Terminal Galerkin state for modes in I (dimension n_ref, zero outside I).
SpectralVector simulate_galerkin(const SimConfig& cfg, const Model& model, const ModeSet& I, std::size_t sample);

/// Terminal modified-process state on modes 1..n_ref with coefficients at P_N(Y).
SpectralVector simulate_modified(const SimConfig& cfg, const Model& model, std::size_t N, std::size_t sample);

/// Exact-in-law terminal OU state for modes in I; normals from step index 0.
SpectralVector simulate_exact_ou(const SimConfig& cfg, const Model& model, const ModeSet& I, std::size_t sample);

/// sup over steps and samples of ||P_N(Y_t) - X^N_t||. With `desync_seed` the
/// modified process draws its noise from a different seed.
double verify_projection_identity(const SimConfig& cfg, const Model& model, std::size_t N,
                                  std::optional<std::uint64_t> desync_seed = {});

}  // namespace seelab
