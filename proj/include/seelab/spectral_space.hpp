#pragma once

// Hilbert-space substrate for diagonal generators.
//
// Modes are 1-based: mode n lives in array slot n-1. A generator A acts by
// A b_n = lambda_n b_n with lambda_n < eta, and the interpolation norms are the
// weighted l2 norms ||x||_{H_r}^2 = sum_n (eta - lambda_n)^{2r} x_n^2.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace seelab {

/// lambda_n = -offset - c * n^rho.
struct PowerLaw {
    double c = 0.0;
    double rho = 0.0;
    double offset = 0.0;
};

/// Finite list of eigenvalues; entry n-1 is lambda_n.
struct ExplicitSpectrum {
    std::vector<double> lambdas;
};

class Eigenstructure {
public:
    static Eigenstructure power_law(double c, double rho, double eta = 0.0, double offset = 0.0);
    static Eigenstructure explicit_list(std::vector<double> lambdas, double eta = 0.0);

    double eta() const { return eta_; }
    double lambda(std::size_t n) const;
    /// eta - lambda_n, strictly positive.
    double gap(std::size_t n) const;

    /// Continuous extension in the mode index (PowerLaw only); used by tail integrals.
    double lambda_at(double x) const;
    double gap_at(double x) const { return eta_ - lambda_at(x); }

    /// Number of modes for an explicit spectrum, nullopt for the infinite power law.
    std::optional<std::size_t> mode_count() const;
    bool is_power_law() const { return std::holds_alternative<PowerLaw>(family_); }
    const PowerLaw* power_law_params() const { return std::get_if<PowerLaw>(&family_); }

    /// Copy with a different shift and eigenvalues moved by `delta_lambda`.
    Eigenstructure shifted(double new_eta, double delta_lambda) const;

private:
    Eigenstructure(double eta, std::variant<PowerLaw, ExplicitSpectrum> family);
    void check_mode(std::size_t n) const;

    double eta_ = 0.0;
    std::variant<PowerLaw, ExplicitSpectrum> family_;
};

/// Coefficients of an element of H in the eigenbasis; modes beyond dim() are zero.
class SpectralVector {
public:
    SpectralVector() = default;
    explicit SpectralVector(std::size_t dim) : coeffs_(dim, 0.0) {}
    explicit SpectralVector(std::vector<double> coeffs);

    static SpectralVector unit(std::size_t dim, std::size_t mode);

    std::size_t dim() const { return coeffs_.size(); }
    double operator[](std::size_t slot) const { return coeffs_[slot]; }
    double& operator[](std::size_t slot) { return coeffs_[slot]; }
    /// 1-based accessor; zero beyond dim().
    double mode(std::size_t n) const { return (n >= 1 && n <= coeffs_.size()) ? coeffs_[n - 1] : 0.0; }

    std::span<const double> coeffs() const { return coeffs_; }
    std::span<double> coeffs() { return coeffs_; }
    const std::vector<double>& values() const { return coeffs_; }

    /// Zero-padded or truncated copy.
    SpectralVector resized(std::size_t dim) const;

    bool operator==(const SpectralVector&) const = default;

private:
    std::vector<double> coeffs_;
};

/// Set of modes: a prefix {1..N} or a boolean mask, optionally complemented
/// (the complement of a finite set is infinite under a power law).
class ModeSet {
public:
    static ModeSet prefix(std::size_t n);
    static ModeSet mask(std::vector<bool> bits);
    static ModeSet full() { return prefix(0).complement(); }
    static ModeSet empty() { return prefix(0); }

    bool contains(std::size_t n) const;
    ModeSet complement() const;
    bool is_complemented() const { return complemented_; }
    bool is_prefix() const { return !mask_.has_value(); }
    /// Largest index that the underlying finite description mentions.
    std::size_t extent() const;
    /// Contained modes among 1..limit.
    std::vector<std::size_t> members_up_to(std::size_t limit) const;

private:
    ModeSet() = default;
    std::size_t prefix_ = 0;
    std::optional<std::vector<bool>> mask_;
    bool complemented_ = false;
};

double hr_norm(const SpectralVector& x, double r, const Eigenstructure& eig);
/// Same norm accumulated as a log-sum-exp; used to cross-check hr_norm.
double hr_norm_logsum(const SpectralVector& x, double r, const Eigenstructure& eig);

SpectralVector project(const SpectralVector& x, const ModeSet& modes);

/// e^{At} x, entry n = e^{lambda_n t} x_n.
SpectralVector semigroup_apply(const SpectralVector& x, double t, const Eigenstructure& eig);

/// inf over the complement of `kept` of (eta - lambda_b).
double complement_gap(const ModeSet& kept, const Eigenstructure& eig);

/// ||P_J||_{L(H, H_{-r})} = [inf_{b in J}(eta - lambda_b)]^{-r} for J the complement of `kept`.
double projection_operator_norm(const ModeSet& kept, double r, const Eigenstructure& eig);

/// (r/e)^r with 0^0 = 1; bounds sup_t ||(-tA)^r e^{At}||.
double smoothing_bound(double r);

/// E_r(x) = [sum_{n>=0} x^{2n} Gamma(r)^n / Gamma(nr+1)]^{1/2}.
double calE(double r, double x);
/// log E_r(x); finite where calE itself would overflow.
double log_calE(double r, double x);

/// int_0^t e^{2 lambda s} ds = (e^{2 lambda t} - 1) / (2 lambda), series branch near lambda t = 0.
double exp_variance_factor(double lambda, double t);

}  // namespace seelab
