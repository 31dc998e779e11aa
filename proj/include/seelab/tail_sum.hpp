#pragma once

#include <functional>

#include "seelab/spectral_space.hpp"

namespace seelab {

/// A value together with a certified enclosure lo <= exact <= hi.
struct Certified {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
};

/// term(x) for a real mode index x; integer x gives the summand of mode x.
using ModeTerm = std::function<double(double)>;
/// int_a^inf term(x) dx.
using TailIntegral = std::function<double(double)>;

struct ModeSumOptions {
    double tail_tol = 1e-14;
    /// Explicit summation starts at least this far out before the tail takes over.
    std::size_t min_explicit = 1024;
    std::size_t max_explicit = std::size_t{1} << 22;
    /// Closed-form tail integral; numerical quadrature when empty.
    TailIntegral integral;
};

/// Sum of term(n) over the members of `modes`.
///
/// Finite sets are summed exactly. For the infinite complement of a finite set
/// under a power law, modes up to K are summed explicitly and the rest is
/// enclosed by [int_K^inf f - f(K)/2, int_{K+1/2}^inf f] (valid for convex
/// decreasing tails, checked on samples; otherwise the monotone bracket
/// [int_{K+1}^inf f, int_K^inf f] is used). K doubles until the enclosure is
/// narrower than tail_tol or max_explicit is reached.
///
/// Throws DomainError when the tail fails the ratio test for convergence.
Certified certified_mode_sum(const Eigenstructure& eig, const ModeSet& modes, const ModeTerm& term,
                             const ModeSumOptions& options = {});

/// Local power-law decay exponent p of term(x) ~ x^{-p}, from term(K)/term(2K).
double tail_decay_exponent(const ModeTerm& term, double at = 65536.0);

/// True when term(x) decays fast enough for its sum to converge (p > 1).
bool tail_converges(const ModeTerm& term);

/// int_a^inf term(x) dx by double-exponential quadrature.
double tail_integral(const ModeTerm& term, double a);

}  // namespace seelab
