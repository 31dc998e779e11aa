#include "seelab/spectral_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "seelab/errors.hpp"

namespace seelab {

namespace {

constexpr double kCalERelTol = 1e-16;
constexpr int kCalEMaxTerms = 100000;

}  // namespace

Eigenstructure::Eigenstructure(double eta, std::variant<PowerLaw, ExplicitSpectrum> family)
    : eta_(eta), family_(std::move(family)) {}

Eigenstructure Eigenstructure::power_law(double c, double rho, double eta, double offset) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("power law: c must be positive and finite");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("power law: rho must be positive and finite");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("eigenstructure: eta must be >= 0");
    if (!std::isfinite(offset)) throw DomainError("power law: offset must be finite");
    // lambda_1 = -offset - c is the supremum of the spectrum.
    if (!(-offset - c < eta)) throw DomainError("power law: sup lambda_n must lie below eta");
    return Eigenstructure(eta, PowerLaw{c, rho, offset});
}

Eigenstructure Eigenstructure::explicit_list(std::vector<double> lambdas, double eta) {
    if (!std::isfinite(eta)) throw DomainError("eigenstructure: eta must be finite");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!std::isfinite(lambdas[i]) || !(lambdas[i] < eta)) {
            std::ostringstream msg;
            msg << "explicit spectrum: lambda_" << i + 1 << " = " << lambdas[i] << " must be finite and < eta = " << eta;
            throw DomainError(msg.str());
        }
    }
    return Eigenstructure(eta, ExplicitSpectrum{std::move(lambdas)});
}

void Eigenstructure::check_mode(std::size_t n) const {
    if (n == 0) throw DomainError("mode indices are 1-based");
    if (auto* ex = std::get_if<ExplicitSpectrum>(&family_); ex && n > ex->lambdas.size()) {
        std::ostringstream msg;
        msg << "mode " << n << " exceeds the explicit spectrum size " << ex->lambdas.size();
        throw DomainError(msg.str());
    }
}

double Eigenstructure::lambda(std::size_t n) const {
    check_mode(n);
    if (auto* pl = std::get_if<PowerLaw>(&family_)) {
        return -pl->offset - pl->c * std::pow(static_cast<double>(n), pl->rho);
    }
    return std::get<ExplicitSpectrum>(family_).lambdas[n - 1];
}

double Eigenstructure::gap(std::size_t n) const { return eta_ - lambda(n); }

double Eigenstructure::lambda_at(double x) const {
    auto* pl = std::get_if<PowerLaw>(&family_);
    if (!pl) throw DomainError("continuous mode index requires a power-law spectrum");
    return -pl->offset - pl->c * std::pow(x, pl->rho);
}

std::optional<std::size_t> Eigenstructure::mode_count() const {
    if (auto* ex = std::get_if<ExplicitSpectrum>(&family_)) return ex->lambdas.size();
    return std::nullopt;
}

Eigenstructure Eigenstructure::shifted(double new_eta, double delta_lambda) const {
    if (auto* pl = std::get_if<PowerLaw>(&family_)) {
        return power_law(pl->c, pl->rho, new_eta, pl->offset - delta_lambda);
    }
    auto lambdas = std::get<ExplicitSpectrum>(family_).lambdas;
    for (double& l : lambdas) l += delta_lambda;
    return explicit_list(std::move(lambdas), new_eta);
}

SpectralVector::SpectralVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    for (double c : coeffs_) {
        if (!std::isfinite(c)) throw DomainError("spectral vector entries must be finite");
    }
}

SpectralVector SpectralVector::unit(std::size_t dim, std::size_t mode) {
    if (mode == 0 || mode > dim) throw DomainError("unit vector mode out of range");
    SpectralVector v(dim);
    v.coeffs_[mode - 1] = 1.0;
    return v;
}

SpectralVector SpectralVector::resized(std::size_t dim) const {
    SpectralVector out(dim);
    std::copy_n(coeffs_.begin(), std::min(dim, coeffs_.size()), out.coeffs_.begin());
    return out;
}

ModeSet ModeSet::prefix(std::size_t n) {
    ModeSet s;
    s.prefix_ = n;
    return s;
}

ModeSet ModeSet::mask(std::vector<bool> bits) {
    ModeSet s;
    s.mask_ = std::move(bits);
    return s;
}

bool ModeSet::contains(std::size_t n) const {
    if (n == 0) return false;
    bool base = mask_ ? (n <= mask_->size() && (*mask_)[n - 1]) : n <= prefix_;
    return base != complemented_;
}

ModeSet ModeSet::complement() const {
    ModeSet s = *this;
    s.complemented_ = !complemented_;
    return s;
}

std::size_t ModeSet::extent() const { return mask_ ? mask_->size() : prefix_; }

std::vector<std::size_t> ModeSet::members_up_to(std::size_t limit) const {
    std::vector<std::size_t> out;
    for (std::size_t n = 1; n <= limit; ++n) {
        if (contains(n)) out.push_back(n);
    }
    return out;
}

double hr_norm(const SpectralVector& x, double r, const Eigenstructure& eig) {
    double sum = 0.0;
    for (std::size_t n = 1; n <= x.dim(); ++n) {
        double xn = x.mode(n);
        if (xn == 0.0) continue;
        double weight = std::exp(2.0 * r * std::log(eig.gap(n)));
        double term = weight * xn * xn;
        if (!std::isfinite(term)) {
            std::ostringstream msg;
            msg << "hr_norm: weight (eta - lambda_" << n << ")^{2r} overflows for r = " << r;
            throw NumericalError(msg.str());
        }
        sum += term;
    }
    if (!std::isfinite(sum)) throw NumericalError("hr_norm: weighted sum overflows");
    return std::sqrt(sum);
}

double hr_norm_logsum(const SpectralVector& x, double r, const Eigenstructure& eig) {
    double log_max = -std::numeric_limits<double>::infinity();
    double scaled = 0.0;
    for (std::size_t n = 1; n <= x.dim(); ++n) {
        double xn = x.mode(n);
        if (xn == 0.0) continue;
        double l = 2.0 * r * std::log(eig.gap(n)) + 2.0 * std::log(std::abs(xn));
        if (l > log_max) {
            scaled = scaled * std::exp(log_max - l) + 1.0;
            log_max = l;
        } else {
            scaled += std::exp(l - log_max);
        }
    }
    if (scaled == 0.0) return 0.0;
    double log_norm = 0.5 * (log_max + std::log(scaled));
    if (log_norm > std::log(std::numeric_limits<double>::max())) {
        throw NumericalError("hr_norm_logsum: norm overflows double precision");
    }
    return std::exp(log_norm);
}

SpectralVector project(const SpectralVector& x, const ModeSet& modes) {
    SpectralVector out(x.dim());
    for (std::size_t n = 1; n <= x.dim(); ++n) {
        if (modes.contains(n)) out[n - 1] = x[n - 1];
    }
    return out;
}

SpectralVector semigroup_apply(const SpectralVector& x, double t, const Eigenstructure& eig) {
    if (!(t >= 0.0)) throw DomainError("semigroup_apply: t must be >= 0");
    SpectralVector out(x.dim());
    for (std::size_t n = 1; n <= x.dim(); ++n) {
        out[n - 1] = std::exp(eig.lambda(n) * t) * x[n - 1];
    }
    return out;
}

double complement_gap(const ModeSet& kept, const Eigenstructure& eig) {
    if (auto count = eig.mode_count()) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n <= *count; ++n) {
            if (!kept.contains(n)) best = std::min(best, eig.gap(n));
        }
        if (!std::isfinite(best)) throw DomainError("projection norm: complement mode set is empty");
        return best;
    }
    // Power law: the gap increases with n, so the infimum sits at the first excluded mode.
    std::size_t limit = kept.is_complemented() ? kept.extent() : kept.extent() + 1;
    for (std::size_t n = 1; n <= limit; ++n) {
        if (!kept.contains(n)) return eig.gap(n);
    }
    throw DomainError("projection norm: complement mode set is empty");
}

double projection_operator_norm(const ModeSet& kept, double r, const Eigenstructure& eig) {
    if (!(r >= 0.0)) throw DomainError("projection norm: r must be >= 0");
    return std::exp(-r * std::log(complement_gap(kept, eig)));
}

double smoothing_bound(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("smoothing_bound: r must lie in [0, 1]");
    if (r == 0.0) return 1.0;
    return std::pow(r / std::exp(1.0), r);
}

double log_calE(double r, double x) {
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("calE: r must lie in (0, 1]");
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("calE: x must be finite and >= 0");
    if (x == 0.0) return 0.0;

    const double log_x2 = 2.0 * std::log(x);
    const double log_gamma_r = std::lgamma(r);
    // Streaming log-sum-exp; n = 0 contributes exactly 1.
    double log_max = 0.0;
    double scaled = 1.0;
    double prev = 0.0;
    for (int n = 1; n < kCalEMaxTerms; ++n) {
        double l = n * (log_x2 + log_gamma_r) - std::lgamma(n * r + 1.0);
        if (l > log_max) {
            scaled = scaled * std::exp(log_max - l) + 1.0;
            log_max = l;
        } else {
            scaled += std::exp(l - log_max);
        }
        double log_sum = log_max + std::log(scaled);
        if (l < prev && l - log_sum < std::log(kCalERelTol)) {
            return 0.5 * log_sum;
        }
        prev = l;
    }
    std::ostringstream msg;
    msg << "calE: series for r = " << r << ", x = " << x << " did not converge within " << kCalEMaxTerms << " terms";
    throw NumericalError(msg.str());
}

double calE(double r, double x) {
    double l = log_calE(r, x);
    if (l > std::log(std::numeric_limits<double>::max())) {
        std::ostringstream msg;
        msg << "calE: value for r = " << r << ", x = " << x << " overflows double precision (log = " << l << ")";
        throw NumericalError(msg.str());
    }
    return std::exp(l);
}

double exp_variance_factor(double lambda, double t) {
    double z = 2.0 * lambda * t;
    if (std::abs(z) < 1e-6) {
        double lt = lambda * t;
        return t * (1.0 + lt + 2.0 * lt * lt / 3.0);
    }
    return std::expm1(z) / (2.0 * lambda);
}

}  // namespace seelab
