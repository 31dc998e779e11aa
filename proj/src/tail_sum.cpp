#include "seelab/tail_sum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "seelab/errors.hpp"

namespace seelab {

namespace {

// Covers compensated-summation error plus a few ulps per evaluated term and
// the relative tolerance requested from the quadrature.
constexpr double kRoundingAllowance = 2e-15;

// Neumaier-compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    double total() const { return sum + carry; }
};

struct Bracket {
    double estimate;
    double lo;
    double hi;
};

bool convex_decreasing_on(const ModeTerm& f, double k) {
    for (double a : {k, 2.0 * k, 4.0 * k}) {
        double h = a / 8.0;
        double f0 = f(a), f1 = f(a + h), f2 = f(a + 2.0 * h);
        if (!(f0 >= f1 && f1 >= f2)) return false;
        if (f0 - 2.0 * f1 + f2 < -1e-12 * f0) return false;
    }
    return true;
}

Bracket tail_bracket(const ModeTerm& f, double k, const TailIntegral& integral) {
    double from_k = integral(k);
    double fk = f(k);
    if (convex_decreasing_on(f, k)) {
        double lo = from_k - 0.5 * fk;
        double hi = integral(k + 0.5);
        if (hi < lo) std::swap(hi, lo);  // quadrature noise on a vanishing tail
        // Euler-Maclaurin places the sum at 2/3 of the way from lo to hi.
        return {lo + (2.0 / 3.0) * (hi - lo), std::max(0.0, lo), hi};
    }
    double lo = integral(k + 1.0);
    double est = std::clamp(from_k - 0.5 * fk, lo, from_k);
    return {est, lo, from_k};
}

}  // namespace

double tail_integral(const ModeTerm& term, double a) {
    if (!(a > 0.0)) throw DomainError("tail_integral: lower limit must be positive");
    boost::math::quadrature::exp_sinh<double> integrator;
    auto g = [&](double u) {
        double x = a * std::exp(u);
        if (!std::isfinite(x)) return 0.0;
        double v = term(x) * x;
        return std::isfinite(v) ? v : 0.0;
    };
    double error = 0.0;
    double value = integrator.integrate(g, 0.0, std::numeric_limits<double>::infinity(), 1e-15, &error);
    if (!std::isfinite(value)) throw NumericalError("tail_integral: quadrature did not produce a finite value");
    return value;
}

double tail_decay_exponent(const ModeTerm& term, double at) {
    double f1 = std::abs(term(at));
    double f2 = std::abs(term(2.0 * at));
    if (f1 == 0.0 || f2 == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(f1 / f2);
}

bool tail_converges(const ModeTerm& term) {
    // The margin absorbs rounding in the ratio, not genuine slow decay.
    return tail_decay_exponent(term, 1048576.0) > 1.0 + 1e-9;
}

Certified certified_mode_sum(const Eigenstructure& eig, const ModeSet& modes, const ModeTerm& term,
                             const ModeSumOptions& options) {
    auto finite_sum = [&](std::size_t limit) {
        CompensatedSum acc;
        double magnitude = 0.0;
        for (std::size_t n : modes.members_up_to(limit)) {
            double t = term(static_cast<double>(n));
            acc.add(t);
            magnitude += std::abs(t);
        }
        double s = acc.total();
        double pad = kRoundingAllowance * magnitude;
        return Certified{s, s - pad, s + pad};
    };

    if (auto count = eig.mode_count()) return finite_sum(*count);
    if (!modes.is_complemented()) return finite_sum(modes.extent());

    if (!tail_converges(term)) {
        std::ostringstream msg;
        msg << "mode sum diverges: terms decay like n^-" << tail_decay_exponent(term, 1048576.0)
            << " (need exponent > 1)";
        throw DomainError(msg.str());
    }

    const TailIntegral integral = options.integral ? options.integral
                                                   : TailIntegral([&](double a) { return tail_integral(term, a); });

    std::size_t k = std::max(modes.extent(), options.min_explicit);
    CompensatedSum partial;
    double magnitude = 0.0;
    auto add_term = [&](std::size_t n) {
        double t = term(static_cast<double>(n));
        partial.add(t);
        magnitude += std::abs(t);
    };
    for (std::size_t n = 1; n <= k; ++n) {
        if (modes.contains(n)) add_term(n);
    }
    Bracket tail = tail_bracket(term, static_cast<double>(k), integral);
    while (tail.hi - tail.lo > options.tail_tol && k < options.max_explicit) {
        std::size_t next = std::min(2 * k, options.max_explicit);
        for (std::size_t n = k + 1; n <= next; ++n) add_term(n);
        k = next;
        tail = tail_bracket(term, static_cast<double>(k), integral);
    }
    double s = partial.total();
    double pad = kRoundingAllowance * (magnitude + std::abs(tail.hi));
    return Certified{s + tail.estimate, s + tail.lo - pad, s + tail.hi + pad};
}

}  // namespace seelab
