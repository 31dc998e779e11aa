// seelab: command-line front end for sweeps, oracles, bounds and the acceptance suite.
//
// Exit codes: 0 success, 1 configuration or domain error, 2 numerical failure,
// 3 acceptance failure.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "seelab/acceptance.hpp"
#include "seelab/analytics.hpp"
#include "seelab/config.hpp"
#include "seelab/errors.hpp"
#include "seelab/experiments.hpp"
#include "seelab/io.hpp"

namespace {

using namespace seelab;

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kAcceptance = 3 };

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::string curve;
};

struct Context {
    RunConfig cfg;
    std::string hash;
    std::filesystem::path out;

    std::string id(const std::string& sub) const { return sub + "-" + hash; }

    ResultRecord record(const std::string& sub) const {
        ResultRecord r;
        r.experiment_id = id(sub);
        r.timestamp = utc_timestamp();
        r.config_hash = hash;
        return r;
    }

    void save(const std::string& name, const std::string& content) const {
        auto path = write_artifact(out, name, content);
        std::cout << "wrote " << path.string() << "\n";
    }

    void save_record(const std::string& sub, const ResultRecord& r) const { save(sub + ".json", to_json(r).dump(2) + "\n"); }
};

Context make_context(const Options& o) {
    Context ctx;
    ctx.cfg = o.config.empty() ? parse_config("") : load_config(o.config);
    if (o.seed) ctx.cfg.seed = *o.seed;
    if (o.samples) ctx.cfg.samples = *o.samples;
    auto violations = validate_config(ctx.cfg);
    if (!violations.empty()) throw ConfigError(violations);
    ctx.hash = config_hash(ctx.cfg);
    ctx.out = o.out.empty() ? std::filesystem::path(ctx.cfg.output_dir) : std::filesystem::path(o.out);
    return ctx;
}

bool prop64_applicable(const RunConfig& c) {
    return c.lambda_values.empty() && c.eta == 0.0 && c.lambda_offset == 0.0 && c.amplitude == 1.0 &&
           c.delta < 0.5 - 1.0 / (2.0 * c.lambda_rho);
}

bool cor65_applicable(const RunConfig& c) {
    return prop64_applicable(c) && c.lambda_rho == 2.0 && c.lambda_c == std::numbers::pi * std::numbers::pi;
}

int cmd_oracle(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    OUSetup setup = ou_setup_of(c.model(), c.T, c.tail_tol);
    ResultRecord rec = ctx.record("oracle");
    std::string csv = "experiment_id,N,gap,sqnorm_weak_error,exp_weak_error,exp_lower_bound,general_lower_bound,"
                      "heat_lower_bound,seed\n";
    auto& values = rec.oracle_values;
    for (std::size_t N : c.n_list) {
        ModeSet I = ModeSet::prefix(N);
        double gap = complement_gap(I, setup.eig);
        double sq = sqnorm_weak_error_exact(setup, I).value;
        double ex = exp_weak_error_exact(setup, I).value;
        double lb = exp_weak_error_lower_bound(setup, I).value;
        double general = prop64_applicable(c) ? prop64_lower_bound(setup, N).value : std::nan("");
        double heat = cor65_applicable(c) ? cor65_lower_bound(N, c.delta, c.T, c.tail_tol).value : std::nan("");
        csv += ctx.id("oracle") + "," + std::to_string(N) + "," + format_real(gap) + "," + format_real(sq) + "," +
               format_real(ex) + "," + format_real(lb) + "," + format_real(general) + "," + format_real(heat) + "," +
               std::to_string(c.seed) + "\n";
        values["N"].push_back(static_cast<double>(N));
        values["sqnorm_weak_error"].push_back(sq);
        values["exp_weak_error"].push_back(ex);
        values["exp_lower_bound"].push_back(lb);
        values["general_lower_bound"].push_back(general);
        values["heat_lower_bound"].push_back(heat);
    }
    ctx.save("oracle.csv", csv);
    ctx.save_record("oracle", rec);
    return kOk;
}

void add_fit(ResultRecord& rec, const std::string& name, const ErrorCurve& curve, std::size_t drop_first) {
    if (curve.points.size() < drop_first + 3) {
        std::cerr << "note: " << name << " fit skipped (fewer than 3 points after fit.drop_first)\n";
        return;
    }
    RateFit fit = fit_rate(curve, drop_first);
    rec.fits[name] = fit;
    std::cout << name << " slope " << fit.slope << " +- " << fit.slope_stderr << " (r^2 " << fit.r_squared << ")\n";
}

int cmd_sweep(const Context& ctx, bool weak) {
    const RunConfig& c = ctx.cfg;
    const std::string sub = weak ? "weak_sweep" : "strong_sweep";
    SweepMode mode = c.use_oracle() ? SweepMode::Oracle : SweepMode::MonteCarlo;
    if (mode == SweepMode::MonteCarlo) {
        for (const auto& w : sim_config_warnings(c.sim_config())) std::cerr << "warning: " << w << "\n";
    }
    ErrorCurve curve = weak ? weak_sweep(c.sim_config(), c.model(), c.phi, c.n_list, mode, c.tail_tol)
                            : strong_sweep(c.sim_config(), c.model(), c.n_list, mode, c.tail_tol);
    ResultRecord rec = ctx.record(sub);
    rec.curves[sub] = curve;
    add_fit(rec, sub, curve, c.drop_first);
    ctx.save(sub + ".csv", curve_csv(curve, ctx.id(sub), c.seed));
    if (rec.fits.count(sub)) ctx.save(sub + "_fit.json", to_json(rec.fits[sub]).dump(2) + "\n");
    ctx.save_record(sub, rec);
    return kOk;
}

int cmd_moll(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    MollBoundParams params{c.bound_p, c.bound_vartheta, c.resolved_rho_strong()};
    Model model = c.model();
    if (c.eta != 0.0) {
        auto shifted = shift_system(model.eig, model.drift);
        model.eig = shifted.eig;
        model.drift = shifted.drift;
    }
    auto result = mollification_sweep(c.sim_config(), model, c.kappa_list, params);
    ResultRecord rec = ctx.record("moll_sweep");
    rec.curves["moll_sweep"] = result.curve;
    rec.bound_values["strong_moll_bound"] = result.bounds;
    if (c.kappa_list.size() >= 3) {
        std::vector<double> errors;
        for (const auto& p : result.curve.points) errors.push_back(p.error);
        try {
            rec.fits["kappa"] = fit_power_law(c.kappa_list, errors);
            std::cout << "kappa slope " << rec.fits["kappa"].slope << "\n";
        } catch (const DomainError& e) {
            std::cerr << "note: kappa fit skipped: " << e.what() << "\n";
        }
    }
    bool within = true;
    for (std::size_t j = 0; j < result.bounds.size(); ++j) {
        const auto& p = result.curve.points[j];
        within = within && p.error <= result.bounds[j] + 4.0 * p.std_error;
        std::cout << "kappa " << p.kappa << ": error " << p.error << " +- " << p.std_error << ", bound "
                  << result.bounds[j] << "\n";
    }
    rec.flags["within_bound"] = within;
    ctx.save("moll_sweep.csv", curve_csv(result.curve, ctx.id("moll_sweep"), c.seed));
    ctx.save_record("moll_sweep", rec);
    return kOk;
}

int cmd_identity(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    double dev = verify_projection_identity(c.sim_config(), c.model(), c.identity_N);
    bool ok = dev <= 1e-10;
    std::cout << "max deviation " << format_real(dev) << (ok ? " (<= 1e-10)" : " (exceeds 1e-10)") << "\n";
    ResultRecord rec = ctx.record("identity_check");
    rec.oracle_values["max_deviation"] = {dev};
    rec.flags["identity_holds"] = ok;
    ctx.save_record("identity_check", rec);
    return ok ? kOk : kAcceptance;
}

int cmd_bounds(const Context& ctx) {
    const RunConfig& c = ctx.cfg;
    Model model = c.model();
    SimConfig sim = c.sim_config();
    ResultRecord rec = ctx.record("bounds");

    Prop21Inputs p21;
    if (is_additive_linear(model) && c.eta == 0.0) {
        p21.moment3 = gaussian_moment3_factor(ou_setup_of(model, c.T, c.tail_tol));
    } else {
        MeanStderr m = estimate_K_moment(sim, model, c.n_ref, 3);
        p21.moment3 = m.mean + 4.0 * m.std_error;
        std::cerr << "note: third moment estimated by Monte Carlo (mean + 4 stderr)\n";
    }
    p21.F_lip0 = drift_lip0_norm(model.drift, model.eig, c.bound_vartheta);
    p21.B_lip0 = diffusion_lip0_norm(model.diffusion, model.eig, c.bound_vartheta);
    for (std::size_t N : c.n_list) {
        double proj = projection_operator_norm(ModeSet::prefix(N), c.bound_rho_weak, model.eig);
        rec.bound_values["projection_weak_bound"].push_back(prop21_weak_bound(p21, c.bound_rho_weak, c.bound_vartheta, c.T, proj));
        rec.bound_values["N"].push_back(static_cast<double>(N));
    }

    Prop41Inputs p41{0.0, p21.F_lip0, p21.B_lip0};
    for (double k : c.kappa_list) {
        rec.bound_values["kappa"].push_back(k);
        rec.bound_values["strong_moll_bound"].push_back(
            prop41_strong_moll_bound(p41, c.bound_p, c.bound_vartheta, c.resolved_rho_strong(), c.T, k));
    }

    if (c.bound_c && c.bound_varsigma && c.bound_F_c1b && c.bound_B_c1b) {
        ParametricInputs in;
        in.c = c.bound_c;
        in.varsigma = *c.bound_varsigma;
        in.F_c1b = *c.bound_F_c1b;
        in.B_c1b = *c.bound_B_c1b;
        const std::pair<const char*, WeakForm> forms[] = {
            {"galerkin_weak_bound", WeakForm::Cor3_3}, {"galerkin_weak_bound_moments", WeakForm::Cor3_4},
            {"shifted_weak_bound", WeakForm::Cor5_2}};
        for (std::size_t N : c.n_list) {
            MeanStderr k4 = estimate_K_moment(sim, model, N, 4);
            in.K4 = k4.mean + 4.0 * k4.std_error;
            BoundGeometry g{c.bound_rho_weak, c.bound_vartheta, c.resolved_theta(), c.T,
                            complement_gap(ModeSet::prefix(N), model.eig)};
            for (const auto& [name, form] : forms) {
                try {
                    rec.bound_values[name].push_back(parametric_weak_bound(in, form, g));
                } catch (const DomainError& e) {
                    rec.bound_values[name].push_back(std::nan(""));
                    std::cerr << "note: " << name << " at N = " << N << ": " << e.what() << "\n";
                }
            }
        }
    } else {
        std::cerr << "note: parametric weak bounds need bounds.c, bounds.varsigma, bounds.F_c1b and bounds.B_c1b\n";
    }
    for (const auto& [name, vals] : rec.bound_values) {
        std::cout << name << ":";
        for (double v : vals) std::cout << " " << format_real(v);
        std::cout << "\n";
    }
    ctx.save_record("bounds", rec);
    return kOk;
}

int cmd_fit(const Options& o, const Context& ctx) {
    if (o.curve.empty()) throw ConfigError({"--curve is required for fit"});
    ErrorCurve curve = read_curve_csv(o.curve);
    RateFit fit = fit_rate(curve, ctx.cfg.drop_first);
    std::string text = to_json(fit).dump(2) + "\n";
    std::cout << text;
    ctx.save("fit.json", text);
    return kOk;
}

int cmd_check(const std::vector<int>& ids) {
    auto results = run_acceptance(ids, [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; });
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seelab: spectral Galerkin convergence laboratory"};
    app.require_subcommand(1);
    Options o;
    std::string seed_text;
    std::size_t samples = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Config file (key = value lines)");
        sub->add_option("--out", o.out, "Output directory (overrides output.dir)");
        sub->add_option("--seed", seed_text, "Seed override");
        sub->add_option("--samples", samples, "Sample-count override");
    };
    const char* names[] = {"oracle", "weak-sweep", "strong-sweep", "moll-sweep", "identity-check", "bounds", "fit", "check"};
    const char* help[] = {"Exact OU error values and lower bounds",
                          "Weak error versus Galerkin size",
                          "Strong error versus Galerkin size",
                          "Strong error of coefficient mollification versus kappa",
                          "Pathwise projection identity check",
                          "Explicit error bounds",
                          "Log-log rate fit of a stored curve",
                          "Run the acceptance suite"};
    std::map<std::string, CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(names); ++i) {
        subs[names[i]] = app.add_subcommand(names[i], help[i]);
        add_common(subs[names[i]]);
    }
    subs["fit"]->add_option("--curve", o.curve, "Curve CSV to fit")->required();
    std::vector<int> criteria;
    subs["check"]->add_option("--criteria", criteria, "Criterion ids to run (default: all)")
        ->delimiter(',')
        ->check(CLI::Range(1, 9));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (!seed_text.empty()) {
            if (seed_text.find_first_not_of("0123456789") != std::string::npos) {
                throw ConfigError({"--seed must be a non-negative integer"});
            }
            o.seed = std::stoull(seed_text);
        }
        if (samples > 0) o.samples = samples;
        if (subs["check"]->parsed()) return cmd_check(criteria);
        Context ctx = make_context(o);
        if (subs["oracle"]->parsed()) return cmd_oracle(ctx);
        if (subs["weak-sweep"]->parsed()) return cmd_sweep(ctx, true);
        if (subs["strong-sweep"]->parsed()) return cmd_sweep(ctx, false);
        if (subs["moll-sweep"]->parsed()) return cmd_moll(ctx);
        if (subs["identity-check"]->parsed()) return cmd_identity(ctx);
        if (subs["bounds"]->parsed()) return cmd_bounds(ctx);
        if (subs["fit"]->parsed()) return cmd_fit(o, ctx);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kNumerical;
    }
    return kOk;
}
