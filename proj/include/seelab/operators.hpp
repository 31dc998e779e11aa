#pragma once

// Diagonal drift F and diffusion B coefficients.
//
// Both act coordinate-wise in the eigenbasis: F(x)_n = nu_n p(x_n) and
// (B(x)u)_n = beta_n(x_n) u_n with beta_n(x) = mu_n p(x) (U = H, noise modes
// aligned with space modes).

#include <cstdint>
#include <map>
#include <optional>

#include "seelab/spectral_space.hpp"
#include "seelab/tail_sum.hpp"

namespace seelab {

enum class Profile { Tanh, InvSqrt1px2 };

/// k-th derivative of the profile, k in 0..4.
double profile_derivative(Profile p, int k, double x);
inline double profile_value(Profile p, double x) { return profile_derivative(p, 0, x); }
/// sup_x |p^{(k)}(x)| for k in 0..2.
double profile_sup(Profile p, int k);

/// k -> declared C^k_b norm (user metadata, not certified).
using DeclaredNorms = std::map<int, double>;

struct DriftSpec {
    enum class Kind { Zero, DiagonalNemytskii };
    Kind kind = Kind::Zero;
    Profile profile = Profile::Tanh;
    /// nu_n = (eta - lambda_n)^sigma_F.
    double sigma_F = 0.0;
    /// Target space H_{-theta}; theta in [0, 1).
    double theta = 0.0;
    /// Adds linear_shift * x_n to every evaluated entry (set by shift_system).
    double linear_shift = 0.0;
    DeclaredNorms declared_norms;
};

struct DiffusionSpec {
    enum class Kind { AdditiveDiagonal, DiagonalNemytskii };
    Kind kind = Kind::AdditiveDiagonal;
    Profile profile = Profile::InvSqrt1px2;
    /// mu_n = amplitude * (eta - lambda_n)^delta.
    double delta = 0.0;
    double amplitude = 1.0;
    /// Target space HS(U, H_{-half_theta}).
    double half_theta = 0.0;
    DeclaredNorms declared_norms;
};

/// Throws DomainError unless F maps into H_{-theta} (partial-sum ratio test).
void validate_drift(const DriftSpec& spec, const Eigenstructure& eig);
/// Throws DomainError unless B is Hilbert-Schmidt into H_{-half_theta}, and,
/// under a power law, unless delta < 1/2 - 1/(2 rho).
void validate_diffusion(const DiffusionSpec& spec, const Eigenstructure& eig);

double drift_scale(const DriftSpec& spec, const Eigenstructure& eig, std::size_t n);
double diffusion_scale(const DiffusionSpec& spec, const Eigenstructure& eig, std::size_t n);

/// F(x) restricted to `active`; zero elsewhere. Output has x.dim() entries.
SpectralVector eval_drift(const DriftSpec& spec, const Eigenstructure& eig, const SpectralVector& x,
                          const ModeSet& active);
/// Diagonal entries beta_n(x_n) restricted to `active`; zero elsewhere.
SpectralVector eval_diffusion_diag(const DiffusionSpec& spec, const Eigenstructure& eig, const SpectralVector& x,
                                   const ModeSet& active);

struct HsNorm {
    /// Norm over modes 1..n_max.
    double truncated = 0.0;
    /// Enclosure of the squared contribution of modes beyond n_max (state zero there).
    Certified tail_sq;
    /// sqrt(truncated^2 + tail_sq.value).
    double value = 0.0;
};

/// ||B(x)||_{HS(U, H_r)}^2 = sum_n (eta - lambda_n)^{2r} beta_n(x_n)^2.
/// The tail beyond n_max is summed only for the infinite power law.
HsNorm hs_norm(const DiffusionSpec& spec, const SpectralVector& x, double r, const Eigenstructure& eig,
               std::size_t n_max);

/// e^{kappa A} y.
SpectralVector mollify(const SpectralVector& y, double kappa, const Eigenstructure& eig);

struct ShiftedSystem {
    Eigenstructure eig;
    DriftSpec drift;
};

/// (A, F) -> (A - eta, F + eta Id). Gaps eta - lambda_n are unchanged.
ShiftedSystem shift_system(const Eigenstructure& eig, const DriftSpec& drift);

struct SeminormEstimate {
    double estimate = 0.0;
    std::optional<double> declared;
    /// estimate <= 1.05 * declared, or no declaration.
    bool consistent = true;
};

struct ProbeOptions {
    std::size_t samples = 256;
    std::size_t modes = 16;
    std::uint64_t seed = 1;
};

/// Lower estimate of the C^k_b seminorm (k in 0..2) from finite differences at random states.
SeminormEstimate estimate_ckb_seminorm(const DriftSpec& spec, const Eigenstructure& eig, int k,
                                       const ProbeOptions& options = {});
SeminormEstimate estimate_ckb_seminorm(const DiffusionSpec& spec, const Eigenstructure& eig, int k,
                                       const ProbeOptions& options = {});

/// Upper value of ||F||_{Lip^0(H, H_{-vartheta})} = ||F(0)|| + Lipschitz constant.
/// Infinite when the per-mode weights are unbounded.
double drift_lip0_norm(const DriftSpec& spec, const Eigenstructure& eig, double vartheta);
/// Upper value of ||B||_{Lip^0(H, HS(U, H_{-vartheta/2}))}.
double diffusion_lip0_norm(const DiffusionSpec& spec, const Eigenstructure& eig, double vartheta);

}  // namespace seelab
