#pragma once

// Flat `key = value` run configuration with dotted keys.
//
// Lines are `key = value`; `#` starts a comment; lists are comma separated.
// Every key has a documented default, so an empty file is a valid
// configuration (the pi^2 n^2 heat-equation setting with delta = 0, T = 1).

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seelab/experiments.hpp"
#include "seelab/simulate.hpp"

namespace seelab {

/// Carries every violated constraint, each prefixed with its key.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

enum class SweepChoice { Auto, Oracle, MonteCarlo };

struct RunConfig {
    // domain.*
    double eta = 0.0;
    double lambda_c = 9.869604401089358;
    double lambda_rho = 2.0;
    double lambda_offset = 0.0;
    /// domain.lambda.values: explicit eigenvalues; overrides the power law when set.
    std::vector<double> lambda_values;

    // sim.*
    double T = 1.0;
    std::size_t steps = 256;
    std::size_t n_ref = 512;
    std::size_t noise_modes = 0;
    std::size_t samples = 4096;
    std::uint64_t seed = 20240917;
    double kappa = 0.0;
    Scheme scheme = Scheme::ExpEuler;

    // galerkin.*
    std::vector<std::size_t> n_list{64, 96, 128, 192, 256, 384, 512};
    SweepChoice sweep = SweepChoice::Auto;

    // drift.*
    DriftSpec::Kind drift_kind = DriftSpec::Kind::Zero;
    Profile drift_profile = Profile::Tanh;
    double sigma_F = 0.0;
    /// Resolved from the spectrum when absent.
    std::optional<double> drift_theta;

    // diffusion.*
    DiffusionSpec::Kind diffusion_kind = DiffusionSpec::Kind::AdditiveDiagonal;
    Profile diffusion_profile = Profile::InvSqrt1px2;
    double delta = 0.0;
    double amplitude = 1.0;
    std::optional<double> half_theta;

    // phi.*, moll.*, analytics.*, fit.*, identity.*
    Phi phi = Phi::ExpNegSq;
    std::vector<double> kappa_list{1e-3, 1e-2, 1e-1};
    double tail_tol = 1e-14;
    std::size_t drop_first = 1;
    std::size_t identity_N = 8;

    // bounds.*
    double bound_vartheta = 0.6;
    double bound_p = 2.0;
    std::optional<double> bound_rho_strong;
    double bound_rho_weak = 0.3;
    /// The six c-constants of the parametric weak bounds; no default.
    std::optional<std::array<double, 6>> bound_c;
    /// Declared setting constants for the parametric bounds; no defaults.
    std::optional<double> bound_varsigma;
    std::optional<double> bound_F_c1b;
    std::optional<double> bound_B_c1b;

    // output.*
    std::string output_dir = "out";

    Eigenstructure eigenstructure() const;
    /// Drift theta, explicit or resolved as sigma_F + 1/(2 rho) + 0.01 (kept below 1).
    double resolved_drift_theta() const;
    /// Diffusion half_theta, explicit or delta + 1/(2 rho) + 0.01 (kept below 1/2).
    double resolved_half_theta() const;
    /// max(drift theta, 2 half_theta).
    double resolved_theta() const;
    /// bounds.rho_strong or 0.99 (1 - vartheta) / 2.
    double resolved_rho_strong() const;

    Model model() const;
    SimConfig sim_config() const;
    bool use_oracle() const;
};

/// Parses and validates; throws ConfigError listing every violation.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field validation; returns every violation (empty when valid).
std::vector<std::string> validate_config(const RunConfig& cfg);

/// `key = value` lines for every key in sorted order, reals with 17 significant digits.
std::string canonical_form(const RunConfig& cfg);
/// FNV-1a 64 of canonical_form, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace seelab
