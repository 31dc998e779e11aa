#pragma once

// Convergence studies: coupled Monte Carlo error estimates, sweeps over the
// Galerkin size, log-log rate fits and the mollification study.
//
// With diagonal coefficients the Galerkin path of size N coincides bitwise
// with the first N modes of any larger Galerkin path driven by the same noise,
// so one reference path per sample serves every coarse resolution.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "seelab/analytics.hpp"
#include "seelab/parallel.hpp"
#include "seelab/simulate.hpp"

namespace seelab {

enum class Phi { SqNorm, ExpNegSq };

double phi_value(Phi phi, std::span<const double> x);

struct ErrorPoint {
    std::size_t N = 0;
    double gap = 0.0;
    double error = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    double dt = 0.0;
    double kappa = 0.0;
};

struct ErrorCurve {
    std::vector<ErrorPoint> points;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    std::size_t points_used = 0;
};

enum class Coupling { Common, Independent };

/// Sample mean of phi(X^{fine}_T) - phi(X^{coarse}_T) and its standard error.
/// Common coupling drives both resolutions with one noise stream.
MeanStderr mc_weak_error(const SimConfig& cfg, const Model& model, Phi phi, std::size_t n_coarse,
                         std::size_t n_fine, Coupling coupling = Coupling::Common,
                         ExecPolicy policy = ExecPolicy::Parallel);

/// (E ||X^{fine}_T - X^{coarse}_T||^2)^{1/2} with a delta-method standard error.
MeanStderr mc_strong_error(const SimConfig& cfg, const Model& model, std::size_t n_coarse, std::size_t n_fine,
                           ExecPolicy policy = ExecPolicy::Parallel);

enum class SweepMode { Oracle, MonteCarlo };

/// Builds the OU oracle setup of an additive linear model.
OUSetup ou_setup_of(const Model& model, double T, double tail_tol);

/// Oracle mode compares X^N with the exact infinite-dimensional solution
/// (additive linear models only); Monte Carlo mode compares with X^{N_ref}.
ErrorCurve weak_sweep(const SimConfig& cfg, const Model& model, Phi phi, const std::vector<std::size_t>& n_list,
                      SweepMode mode, double tail_tol = 1e-14, ExecPolicy policy = ExecPolicy::Parallel);
ErrorCurve strong_sweep(const SimConfig& cfg, const Model& model, const std::vector<std::size_t>& n_list,
                        SweepMode mode, double tail_tol = 1e-14, ExecPolicy policy = ExecPolicy::Parallel);

/// OLS of log(y) on log(x).
RateFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);
/// OLS of log(error) on log(gap) after discarding the first `drop_first` points.
RateFit fit_rate(const ErrorCurve& curve, std::size_t drop_first = 1);

struct MollificationCurve {
    /// One point per kappa; N = N_ref.
    ErrorCurve curve;
    /// Strong mollification bound per kappa.
    std::vector<double> bounds;
};

struct MollBoundParams {
    double p = 2.0;
    double vartheta = 0.6;
    double rho = 0.198;
};

/// Coupled ||X^0_T - X^kappa_T||_{L^2} on N_ref modes for each kappa in (0, 1].
MollificationCurve mollification_sweep(const SimConfig& cfg, const Model& model, const std::vector<double>& kappas,
                                       const MollBoundParams& bound, ExecPolicy policy = ExecPolicy::Parallel);

struct RateRatio {
    double ratio = 0.0;
    double ratio_stderr = 0.0;
    bool consistent_with_two = false;
    std::string note;
};

/// weak slope / strong slope with propagated slope uncertainty.
RateRatio twice_rate_report(const RateFit& weak, const RateFit& strong);

/// E phi-difference between the step sizes dt and dt/2 at Galerkin size N,
/// coarse normals formed from pairs of fine ones.
MeanStderr temporal_bias(const SimConfig& cfg, const Model& model, Phi phi, std::size_t N,
                         ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace seelab
