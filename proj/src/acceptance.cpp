#include "seelab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "seelab/analytics.hpp"
#include "seelab/config.hpp"
#include "seelab/experiments.hpp"
#include "seelab/io.hpp"

namespace seelab {

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool passed = false;
    std::string detail;
};

const std::vector<std::size_t> kOracleNs{64, 96, 128, 192, 256, 384, 512};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

OUSetup default_setup() {
    RunConfig rc;
    return ou_setup_of(rc.model(), rc.T, rc.tail_tol);
}

// Restores SEE_THREADS on scope exit.
class ThreadEnvGuard {
public:
    ThreadEnvGuard() {
        if (const char* v = std::getenv("SEE_THREADS")) saved_ = v;
    }
    ~ThreadEnvGuard() {
        if (saved_) setenv("SEE_THREADS", saved_->c_str(), 1);
        else unsetenv("SEE_THREADS");
    }
    ThreadEnvGuard(const ThreadEnvGuard&) = delete;
    ThreadEnvGuard& operator=(const ThreadEnvGuard&) = delete;

private:
    std::optional<std::string> saved_;
};

Outcome exact_weak_rate() {
    RunConfig rc;
    auto curve = weak_sweep(rc.sim_config(), rc.model(), Phi::ExpNegSq, kOracleNs, SweepMode::Oracle, rc.tail_tol);
    RateFit fit = fit_rate(curve);
    bool ok = std::abs(fit.slope + 0.5) <= 0.05;
    return {ok, "slope " + fmt(fit.slope, 6) + " (target -0.5 +- 0.05), r^2 " + fmt(fit.r_squared, 6)};
}

Outcome weak_twice_strong() {
    RunConfig rc;
    auto cfg = rc.sim_config();
    auto model = rc.model();
    RateFit weak = fit_rate(weak_sweep(cfg, model, Phi::SqNorm, kOracleNs, SweepMode::Oracle, rc.tail_tol));
    RateFit strong = fit_rate(strong_sweep(cfg, model, kOracleNs, SweepMode::Oracle, rc.tail_tol));
    RateRatio ratio = twice_rate_report(weak, strong);
    bool ok = std::abs(weak.slope + 0.5) <= 0.05 && std::abs(strong.slope + 0.25) <= 0.03 && ratio.ratio >= 1.8 &&
              ratio.ratio <= 2.2;
    return {ok, "weak slope " + fmt(weak.slope, 6) + ", strong slope " + fmt(strong.slope, 6) + ", ratio " +
                    fmt(ratio.ratio, 6) + " (targets -0.5 +- 0.05, -0.25 +- 0.03, [1.8, 2.2])"};
}

Outcome lower_bound_chain() {
    RunConfig rc;
    OUSetup setup = default_setup();
    std::size_t violations = 0;
    double tightest = 1e300;
    for (std::size_t N : kOracleNs) {
        Certified cor = cor65_lower_bound(N, rc.delta, rc.T, rc.tail_tol);
        Certified lower = exp_weak_error_lower_bound(setup, ModeSet::prefix(N));
        Certified exact = exp_weak_error_exact(setup, ModeSet::prefix(N));
        if (!(cor.hi <= lower.lo)) ++violations;
        if (!(lower.hi <= exact.lo)) ++violations;
        tightest = std::min(tightest, (exact.lo - lower.hi) / exact.value);
    }
    return {violations == 0, std::to_string(violations) + " violated comparisons over " +
                                 std::to_string(kOracleNs.size()) + " N; smallest relative margin lower->exact " +
                                 fmt(tightest)};
}

Outcome ou_variance() {
    constexpr std::size_t kModes = 8;
    RunConfig rc;
    Model model = rc.model();
    OUSetup setup = default_setup();
    SimConfig cfg = rc.sim_config();
    cfg.n_ref = kModes;
    cfg.samples = 10000;
    cfg.seed = 20240917;

    std::size_t failures = 0;
    double worst = 0.0;
    auto check = [&](const McSlots& slots) {
        for (std::size_t n = 1; n <= kModes; ++n) {
            MeanStderr v = variance_stderr(slots.column(n - 1));
            double z = std::abs(v.mean - mode_variance(setup, n)) / v.std_error;
            worst = std::max(worst, z);
            if (!(z <= 4.0)) ++failures;
        }
    };

    cfg.scheme = Scheme::ExactOU;
    cfg.steps = 1;
    check(run_samples(cfg.samples, kModes, ExecPolicy::Parallel, [&](std::size_t s, double* row) {
        auto x = simulate_exact_ou(cfg, model, ModeSet::prefix(kModes), s);
        std::copy(x.values().begin(), x.values().end(), row);
    }));

    cfg.scheme = Scheme::ExpEuler;
    cfg.steps = 1u << 14;
    Stepper stepper(model, cfg.dt(), 0.0, kModes, ModeSet::full(), kModes, kModes);
    check(run_samples(cfg.samples, kModes, ExecPolicy::Parallel, [&](std::size_t s, double* row) {
        std::vector<double> x(kModes, 0.0);
        run_path(cfg, stepper, s, x);
        std::copy(x.begin(), x.end(), row);
    }));
    return {failures == 0, std::to_string(failures) + " of 16 mode variances outside 4 stderr; worst |z| " + fmt(worst)};
}

Outcome projection_identity() {
    double worst = 0.0;
    for (bool nonlinear : {false, true}) {
        RunConfig rc;
        if (nonlinear) {
            rc.drift_kind = DriftSpec::Kind::DiagonalNemytskii;
            rc.diffusion_kind = DiffusionSpec::Kind::DiagonalNemytskii;
        }
        rc.n_ref = 64;
        rc.steps = 1u << 10;
        rc.samples = 16;
        SimConfig cfg = rc.sim_config();
        cfg.xi = SpectralVector(std::vector<double>(64, 0.1));
        worst = std::max(worst, verify_projection_identity(cfg, rc.model(), 8));
    }
    return {worst <= 1e-10, "max deviation " + fmt(worst) + " over additive and nonlinear configs (limit 1e-10)"};
}

Outcome projection_bound() {
    RunConfig rc;
    Model model = rc.model();
    OUSetup setup = default_setup();
    Prop21Inputs in;
    in.moment3 = gaussian_moment3_factor(setup);
    in.F_lip0 = drift_lip0_norm(model.drift, model.eig, rc.bound_vartheta);
    in.B_lip0 = diffusion_lip0_norm(model.diffusion, model.eig, rc.bound_vartheta);
    std::size_t violations = 0;
    double min_ratio = 1e300;
    for (std::size_t N : kOracleNs) {
        double proj = projection_operator_norm(ModeSet::prefix(N), rc.bound_rho_weak, model.eig);
        double bound = prop21_weak_bound(in, rc.bound_rho_weak, rc.bound_vartheta, rc.T, proj);
        Certified exact = exp_weak_error_exact(setup, ModeSet::prefix(N));
        if (!(bound >= exact.hi)) ++violations;
        min_ratio = std::min(min_ratio, bound / exact.hi);
    }
    return {violations == 0, std::to_string(violations) + " violations; smallest bound/exact ratio " + fmt(min_ratio)};
}

Outcome mollification() {
    RunConfig rc;
    rc.scheme = Scheme::ExactOU;
    rc.samples = 4096;
    SimConfig cfg = rc.sim_config();
    MollBoundParams params{rc.bound_p, rc.bound_vartheta, rc.resolved_rho_strong()};
    auto result = mollification_sweep(cfg, rc.model(), rc.kappa_list, params);
    std::size_t violations = 0;
    std::vector<double> errors;
    for (std::size_t j = 0; j < rc.kappa_list.size(); ++j) {
        const auto& p = result.curve.points[j];
        if (!(p.error <= result.bounds[j] + 4.0 * p.std_error)) ++violations;
        errors.push_back(p.error);
    }
    RateFit fit = fit_power_law(rc.kappa_list, errors);
    double threshold = (1.0 - rc.resolved_theta()) / 2.0 - 0.1;
    bool ok = violations == 0 && fit.slope >= threshold;
    std::ostringstream d;
    d << violations << " bound violations; errors";
    for (double e : errors) d << " " << fmt(e);
    d << " vs bounds";
    for (double b : result.bounds) d << " " << fmt(b);
    d << "; kappa-slope " << fmt(fit.slope) << " (need >= " << fmt(threshold) << ")";
    return {ok, d.str()};
}

Outcome nonlinear_suite() {
    RunConfig rc;
    rc.diffusion_kind = DiffusionSpec::Kind::DiagonalNemytskii;
    rc.n_ref = 512;
    rc.samples = 4096;
    rc.steps = 256;
    rc.n_list = {8, 16, 32, 64};
    SimConfig cfg = rc.sim_config();
    Model model = rc.model();
    auto weak = weak_sweep(cfg, model, Phi::ExpNegSq, rc.n_list, SweepMode::MonteCarlo);
    auto strong = strong_sweep(cfg, model, rc.n_list, SweepMode::MonteCarlo);
    bool monotone = true;
    for (std::size_t i = 1; i < weak.points.size(); ++i) {
        const auto& a = weak.points[i - 1];
        const auto& b = weak.points[i];
        if (!(b.error <= a.error + 4.0 * std::hypot(a.std_error, b.std_error))) monotone = false;
    }
    RateFit wf = fit_rate(weak, rc.drop_first);
    RateFit sf = fit_rate(strong, rc.drop_first);
    RateRatio ratio = twice_rate_report(wf, sf);
    MeanStderr bias = temporal_bias(cfg, model, Phi::ExpNegSq, rc.n_list.back());
    double smallest = weak.points.back().error;
    bool dt_ok = std::abs(bias.mean) + 2.0 * bias.std_error < 0.1 * smallest;
    bool ok = monotone && std::isfinite(ratio.ratio) && ratio.ratio >= 1.5 && dt_ok;
    std::ostringstream d;
    d << (monotone ? "monotone" : "NOT monotone") << " weak errors";
    for (const auto& p : weak.points) d << " " << fmt(p.error);
    d << "; slopes weak " << fmt(wf.slope) << " strong " << fmt(sf.slope) << " ratio " << fmt(ratio.ratio)
      << " (need >= 1.5); temporal bias " << fmt(bias.mean) << " +- " << fmt(bias.std_error) << " vs 10% of "
      << fmt(smallest);
    return {ok, d.str()};
}

Outcome infrastructure() {
    std::vector<std::string> problems;

    RunConfig rc;
    rc.drift_kind = DriftSpec::Kind::DiagonalNemytskii;
    rc.diffusion_kind = DiffusionSpec::Kind::DiagonalNemytskii;
    rc.n_ref = 64;
    rc.samples = 256;
    rc.steps = 32;
    rc.n_list = {4, 8, 16};
    std::string csv[2];
    {
        ThreadEnvGuard guard;
        const char* counts[2] = {"1", "4"};
        for (int i = 0; i < 2; ++i) {
            setenv("SEE_THREADS", counts[i], 1);
            auto curve = weak_sweep(rc.sim_config(), rc.model(), Phi::ExpNegSq, rc.n_list, SweepMode::MonteCarlo);
            csv[i] = curve_csv(curve, "determinism-" + config_hash(rc), rc.seed);
        }
    }
    if (csv[0] != csv[1]) problems.push_back("CSV bytes differ between 1 and 4 threads");

    double worst_cal = 0.0;
    for (double r : {0.25, 0.5, 0.75, 1.0}) {
        for (double x : {0.1, 0.5, 1.0}) {
            double ref = calE_reference(r, x);
            worst_cal = std::max(worst_cal, std::abs(calE(r, x) - ref) / ref);
        }
    }
    if (!(worst_cal <= 1e-12)) problems.push_back("calE relative error " + fmt(worst_cal));

    double worst_proj = 0.0;
    const double pi2 = std::numbers::pi * std::numbers::pi;
    struct Law {
        double c, rho, eta, offset;
    };
    for (Law law : {Law{pi2, 2.0, 0.0, 0.0}, Law{3.0, 1.5, 1.0, 0.5}}) {
        Eigenstructure eig = Eigenstructure::power_law(law.c, law.rho, law.eta, law.offset);
        for (std::size_t N : {1u, 7u, 64u, 1000u}) {
            for (double r : {0.1, 0.5, 1.5}) {
                double gap = law.eta + law.offset + law.c * std::pow(static_cast<double>(N + 1), law.rho);
                double expected = std::pow(gap, -r);
                double got = projection_operator_norm(ModeSet::prefix(N), r, eig);
                worst_proj = std::max(worst_proj, std::abs(got - expected) / expected);
            }
        }
    }
    if (!(worst_proj <= 1e-12)) problems.push_back("projection norm relative error " + fmt(worst_proj));

    std::string d = "CSV " + std::string(csv[0] == csv[1] ? "identical" : "differs") + " across 1/4 threads; calE max rel err " +
                    fmt(worst_cal) + "; projection norm max rel err " + fmt(worst_proj);
    return {problems.empty(), d};
}

struct Criterion {
    const char* name;
    double budget;
    Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"exact weak rate (oracle sweep)", 5.0, exact_weak_rate},
    {"weak rate twice the strong rate", 5.0, weak_twice_strong},
    {"lower-bound chain", 2.0, lower_bound_chain},
    {"OU terminal variances", 60.0, ou_variance},
    {"pathwise projection identity", 30.0, projection_identity},
    {"projection weak-error bound", 2.0, projection_bound},
    {"mollification strong error", 120.0, mollification},
    {"nonlinear diffusion properties", 600.0, nonlinear_suite},
    {"infrastructure invariants", 10.0, infrastructure},
};

}  // namespace

double calE_reference(double r, double x) {
    using Big = boost::multiprecision::cpp_bin_float_50;
    const Big log_base = 2 * log(Big(x)) + boost::math::lgamma(Big(r));
    Big sum = 1;
    Big last = 1;
    for (int n = 1;; ++n) {
        Big term = exp(n * log_base - boost::math::lgamma(Big(n) * r + 1));
        sum += term;
        // Past the peak and below 1e-45 of the sum.
        if (term < last && term < sum * Big("1e-45")) break;
        last = term;
    }
    return static_cast<double>(sqrt(sum));
}

CriterionResult run_criterion(int id) {
    if (id < 1 || id > static_cast<int>(std::size(kCriteria))) throw std::out_of_range("criterion id must lie in 1..9");
    const Criterion& c = kCriteria[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = c.name;
    r.budget_seconds = c.budget;
    auto start = Clock::now();
    try {
        Outcome o = c.run();
        r.passed = o.passed;
        r.detail = o.detail;
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (r.seconds > r.budget_seconds) {
        r.passed = false;
        r.detail += "; over runtime budget";
    }
    return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<int> list = ids;
    if (list.empty()) {
        for (int i = 1; i <= static_cast<int>(std::size(kCriteria)); ++i) list.push_back(i);
    }
    std::vector<CriterionResult> out;
    for (int id : list) {
        out.push_back(run_criterion(id));
        if (on_result) on_result(out.back());
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail << " (" << r.seconds
       << " s / " << r.budget_seconds << " s)";
    return os.str();
}

}  // namespace seelab
