#pragma once

// Closed-form Ornstein-Uhlenbeck oracles and explicit error-bound evaluators.
//
// In the additive linear setting every mode b is an independent OU process
// with Var<b, X_t> = mu_b^2 (e^{2 lambda_b t} - 1) / (2 lambda_b) and
// mu_b = amplitude (eta - lambda_b)^delta. All infinite sums and products come
// back as certified enclosures.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "seelab/parallel.hpp"
#include "seelab/simulate.hpp"
#include "seelab/spectral_space.hpp"
#include "seelab/tail_sum.hpp"

namespace seelab {

/// mu^2 (e^{2 lambda t} - 1) / (2 lambda), Taylor branch for |2 lambda t| < 1e-6.
double ou_mode_variance(double lambda, double mu, double t);

struct OUSetup {
    Eigenstructure eig;
    double delta = 0.0;
    double T = 1.0;
    double tail_tol = 1e-14;
    double amplitude = 1.0;
};

/// Throws DomainError when sum_b mu_b^2 / (eta - lambda_b) diverges (under a
/// power law: unless delta < 1/2 - 1/(2 rho)) or T <= 0.
void validate_ou_setup(const OUSetup& setup);

/// Terminal variance of mode n.
double mode_variance(const OUSetup& setup, std::size_t n);

/// sum_{b in J} Var<b, X_T> = E ||X^J_T||^2 for xi = 0.
Certified sqnorm_expectation(const OUSetup& setup, const ModeSet& J);
/// E ||X_T||^2 - E ||X^I_T||^2 = sum over the complement of I.
Certified sqnorm_weak_error_exact(const OUSetup& setup, const ModeSet& I);

/// E exp(-||X^J_T||^2) = prod_{b in J} (1 + 2 Var_b)^{-1/2}, in the log domain.
Certified exp_functional_expectation(const OUSetup& setup, const ModeSet& J);
/// E phi(X^I_T) - E phi(X_T) = P_I (1 - P_{complement}) for phi = exp(-||.||^2).
Certified exp_weak_error_exact(const OUSetup& setup, const ModeSet& I);
/// E phi(X^I_T) - E phi(X^J_T) for finite I subset of J.
Certified exp_weak_error_between(const OUSetup& setup, const ModeSet& I, const ModeSet& J);
/// E phi(X_T) S / (2 (1 + S)^{3/2}) with S = E ||X^{complement}_T||^2.
Certified exp_weak_error_lower_bound(const OUSetup& setup, const ModeSet& I);

/// General power-law lower bound for I = {1..N}; requires lambda_n = -c n^rho
/// (eta = 0, no offset), unit amplitude and delta < 1/2 - 1/(2 rho).
Certified prop64_lower_bound(const OUSetup& setup, std::size_t N);
/// Specialization c = pi^2, rho = 2 with its simplified constant; delta < 1/4.
Certified cor65_lower_bound(std::size_t N, double delta, double T, double tail_tol = 1e-14);

/// Seminorm metadata of phi(v) = exp(-||v||^2), rounded up to 6 significant digits.
namespace phi_exp {
inline constexpr double value_at_zero = 1.0;
/// sup ||phi'|| = sqrt(2/e).
inline constexpr double lip0 = 0.857764;
/// sup ||phi''||, attained at 0.
inline constexpr double lip1 = 2.0;
/// sup ||phi'''|| = sup_a e^{-a^2} |12 a - 8 a^3|.
inline constexpr double lip2 = 3.90357;
/// ||phi||_{Lip^2} = ||phi||_{C^3_b} = |phi(0)| + lip0 + lip1 + lip2.
inline constexpr double lip2_norm = 7.76134;
inline constexpr double c3b_norm = lip2_norm;
inline constexpr double c1b_norm = 1.85777;
}  // namespace phi_exp

/// max{1, (E||X_T||^4)^{3/4}} with E||X||^4 = (sum s_b^2)^2 + 2 sum s_b^4 for
/// centred Gaussian X (xi = 0); upper end of the certified sums.
double gaussian_moment3_factor(const OUSetup& setup);

struct Prop21Inputs {
    double phi_lip2 = phi_exp::lip2_norm;
    /// max{1, sup_t E ||X_t||^3}.
    double moment3 = 1.0;
    double F_lip0 = 0.0;
    double B_lip0 = 0.0;
};

/// Projection weak-error bound; rho in [0, 1 - vartheta).
double prop21_weak_bound(const Prop21Inputs& in, double rho, double vartheta, double T, double proj_norm);

struct Prop41Inputs {
    /// ||xi||_{L^p(P; H)}.
    double xi_lp = 0.0;
    double F_lip0 = 0.0;
    double B_lip0 = 0.0;
};

/// Strong mollification bound on ||X^0_T - X^kappa_T||_{L^p}; p >= 2, rho in [0, (1 - vartheta)/2).
double prop41_strong_moll_bound(const Prop41Inputs& in, double p, double vartheta, double rho, double T,
                                double kappa);

enum class WeakForm { Cor3_3, Cor3_4, Cor5_2 };

/// Inputs of the bounds that depend on Kolmogorov-derivative constants.
struct ParametricInputs {
    double phi_c3b = phi_exp::c3b_norm;
    double phi_c1b = phi_exp::c1b_norm;
    double varsigma = 1.0;
    /// K^I_4 (Cor3_3).
    double K4 = 1.0;
    /// E max{1, ||xi||^4} (Cor3_4, Cor5_2).
    double xi_moment4 = 1.0;
    /// ||F||_{C^1_b(H, H_{-theta})}; ||eta Id + F|| for Cor5_2.
    double F_c1b = 0.0;
    double B_c1b = 0.0;
    /// c_{-v}, c_{-v,0}, c_{-v,0,0}, c_{-v/2,-v/2}, c_{-v/2,-v/2,0}, c_{-v/2,-v/2,0,0}
    /// (sup over kappa for Cor5_2). Never defaulted.
    std::optional<std::array<double, 6>> c;
    /// ||Id||_{L(H, H_{-2})} (Cor5_2).
    double id_norm_minus2 = 1.0;
};

struct BoundGeometry {
    double rho = 0.0;
    double vartheta = 0.0;
    double theta = 0.0;
    double T = 1.0;
    /// inf over the discarded modes of (eta - lambda_b).
    double gap = 1.0;
};

double parametric_weak_bound(const ParametricInputs& in, WeakForm form, const BoundGeometry& g);

struct KappaChoice {
    double kappa = 0.0;
    double bound = 0.0;
};

/// Grid minimizer of weak(kappa) + strong(kappa); ties go to the smaller kappa.
KappaChoice optimize_kappa(const std::function<double(double)>& weak_bound,
                           const std::function<double(double)>& strong_bound, const std::vector<double>& grid);

/// max over up to `slices` evenly spaced times of the sample mean of
/// max{1, ||Y_t||^r} for the modified process Y^{N, kappa}; r in 1..4.
MeanStderr estimate_K_moment(const SimConfig& cfg, const Model& model, std::size_t N, int r,
                             ExecPolicy policy = ExecPolicy::Parallel, std::size_t slices = 64);

}  // namespace seelab
