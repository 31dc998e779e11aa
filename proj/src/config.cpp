#include "seelab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "seelab/errors.hpp"

namespace seelab {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out = "invalid configuration:";
    for (const auto& l : lines) out += "\n  " + l;
    return out;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double parse_real(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("expected a real number");
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) throw std::invalid_argument("expected a real number, got '" + s + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("value must be finite");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
    }
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno == ERANGE) throw std::invalid_argument("integer out of range");
    return v;
}

std::string real_str(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

template <class T, class F>
std::string list_str(const std::vector<T>& v, F&& f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + f(v[i]);
    return out;
}

template <class E>
E parse_enum(const std::string& s, const std::vector<std::pair<std::string, E>>& options) {
    for (const auto& [name, e] : options) {
        if (s == name) return e;
    }
    std::string names;
    for (const auto& [name, e] : options) names += (names.empty() ? "" : ", ") + name;
    throw std::invalid_argument("expected one of {" + names + "}, got '" + s + "'");
}

template <class E>
std::string enum_str(E e, const std::vector<std::pair<std::string, E>>& options) {
    for (const auto& [name, v] : options) {
        if (v == e) return name;
    }
    return "?";
}

const std::vector<std::pair<std::string, Scheme>> kSchemes{{"exp_euler", Scheme::ExpEuler}, {"exact_ou", Scheme::ExactOU}};
const std::vector<std::pair<std::string, SweepChoice>> kSweeps{
    {"auto", SweepChoice::Auto}, {"oracle", SweepChoice::Oracle}, {"monte_carlo", SweepChoice::MonteCarlo}};
const std::vector<std::pair<std::string, DriftSpec::Kind>> kDriftKinds{
    {"zero", DriftSpec::Kind::Zero}, {"diagonal_nemytskii", DriftSpec::Kind::DiagonalNemytskii}};
const std::vector<std::pair<std::string, DiffusionSpec::Kind>> kDiffusionKinds{
    {"additive", DiffusionSpec::Kind::AdditiveDiagonal}, {"diagonal_nemytskii", DiffusionSpec::Kind::DiagonalNemytskii}};
const std::vector<std::pair<std::string, Profile>> kProfiles{{"tanh", Profile::Tanh}, {"inv_sqrt", Profile::InvSqrt1px2}};
const std::vector<std::pair<std::string, Phi>> kPhis{{"sq_norm", Phi::SqNorm}, {"exp_neg_sq", Phi::ExpNegSq}};

struct KeySpec {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

KeySpec real_key(double RunConfig::*field) {
    return {[field](RunConfig& c, const std::string& v) { c.*field = parse_real(v); },
            [field](const RunConfig& c) { return real_str(c.*field); }};
}

KeySpec size_key(std::size_t RunConfig::*field) {
    return {[field](RunConfig& c, const std::string& v) { c.*field = static_cast<std::size_t>(parse_u64(v)); },
            [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

KeySpec opt_real_key(std::optional<double> RunConfig::*field) {
    return {[field](RunConfig& c, const std::string& v) {
                if (v == "auto") c.*field = std::nullopt;
                else c.*field = parse_real(v);
            },
            [field](const RunConfig& c) { return (c.*field) ? real_str(*(c.*field)) : std::string("auto"); }};
}

template <class E>
KeySpec enum_key(E RunConfig::*field, const std::vector<std::pair<std::string, E>>& options) {
    return {[field, &options](RunConfig& c, const std::string& v) { c.*field = parse_enum(v, options); },
            [field, &options](const RunConfig& c) { return enum_str(c.*field, options); }};
}

const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> table = [] {
        std::map<std::string, KeySpec> t;
        t["domain.eta"] = real_key(&RunConfig::eta);
        t["domain.lambda.c"] = real_key(&RunConfig::lambda_c);
        t["domain.lambda.rho"] = real_key(&RunConfig::lambda_rho);
        t["domain.lambda.offset"] = real_key(&RunConfig::lambda_offset);
        t["domain.lambda.values"] = {
            [](RunConfig& c, const std::string& v) {
                c.lambda_values.clear();
                for (const auto& s : split_list(v)) c.lambda_values.push_back(parse_real(s));
            },
            [](const RunConfig& c) { return list_str(c.lambda_values, real_str); }};
        t["sim.T"] = real_key(&RunConfig::T);
        t["sim.steps"] = size_key(&RunConfig::steps);
        t["sim.N_ref"] = size_key(&RunConfig::n_ref);
        t["sim.noise_modes"] = size_key(&RunConfig::noise_modes);
        t["sim.samples"] = size_key(&RunConfig::samples);
        t["sim.seed"] = {[](RunConfig& c, const std::string& v) { c.seed = parse_u64(v); },
                         [](const RunConfig& c) { return std::to_string(c.seed); }};
        t["sim.kappa"] = real_key(&RunConfig::kappa);
        t["sim.scheme"] = enum_key(&RunConfig::scheme, kSchemes);
        t["galerkin.N_list"] = {
            [](RunConfig& c, const std::string& v) {
                c.n_list.clear();
                for (const auto& s : split_list(v)) c.n_list.push_back(static_cast<std::size_t>(parse_u64(s)));
            },
            [](const RunConfig& c) { return list_str(c.n_list, [](std::size_t n) { return std::to_string(n); }); }};
        t["galerkin.mode"] = enum_key(&RunConfig::sweep, kSweeps);
        t["drift.kind"] = enum_key(&RunConfig::drift_kind, kDriftKinds);
        t["drift.profile"] = enum_key(&RunConfig::drift_profile, kProfiles);
        t["drift.sigma_F"] = real_key(&RunConfig::sigma_F);
        t["drift.theta"] = opt_real_key(&RunConfig::drift_theta);
        t["diffusion.kind"] = enum_key(&RunConfig::diffusion_kind, kDiffusionKinds);
        t["diffusion.profile"] = enum_key(&RunConfig::diffusion_profile, kProfiles);
        t["diffusion.delta"] = real_key(&RunConfig::delta);
        t["diffusion.amplitude"] = real_key(&RunConfig::amplitude);
        t["diffusion.half_theta"] = opt_real_key(&RunConfig::half_theta);
        t["phi.kind"] = enum_key(&RunConfig::phi, kPhis);
        t["moll.kappa_list"] = {
            [](RunConfig& c, const std::string& v) {
                c.kappa_list.clear();
                for (const auto& s : split_list(v)) c.kappa_list.push_back(parse_real(s));
            },
            [](const RunConfig& c) { return list_str(c.kappa_list, real_str); }};
        t["analytics.tail_tol"] = real_key(&RunConfig::tail_tol);
        t["fit.drop_first"] = size_key(&RunConfig::drop_first);
        t["identity.N"] = size_key(&RunConfig::identity_N);
        t["bounds.vartheta"] = real_key(&RunConfig::bound_vartheta);
        t["bounds.p"] = real_key(&RunConfig::bound_p);
        t["bounds.rho_strong"] = opt_real_key(&RunConfig::bound_rho_strong);
        t["bounds.rho_weak"] = real_key(&RunConfig::bound_rho_weak);
        t["bounds.c"] = {
            [](RunConfig& c, const std::string& v) {
                if (v == "none") {
                    c.bound_c.reset();
                    return;
                }
                auto items = split_list(v);
                if (items.size() != 6) throw std::invalid_argument("expected 6 comma-separated reals");
                std::array<double, 6> arr{};
                for (std::size_t i = 0; i < 6; ++i) arr[i] = parse_real(items[i]);
                c.bound_c = arr;
            },
            [](const RunConfig& c) {
                if (!c.bound_c) return std::string("none");
                return list_str(std::vector<double>(c.bound_c->begin(), c.bound_c->end()), real_str);
            }};
        t["bounds.varsigma"] = opt_real_key(&RunConfig::bound_varsigma);
        t["bounds.F_c1b"] = opt_real_key(&RunConfig::bound_F_c1b);
        t["bounds.B_c1b"] = opt_real_key(&RunConfig::bound_B_c1b);
        t["output.dir"] = {[](RunConfig& c, const std::string& v) { c.output_dir = v; },
                           [](const RunConfig& c) { return c.output_dir; }};
        return t;
    }();
    return table;
}

// Keeps a resolved exponent strictly inside [0, cap).
double resolve_exponent(double critical, double cap) {
    double base = std::max(0.0, critical);
    return std::min(base + 0.01, (base + cap) / 2.0);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_lines(violations)), violations_(std::move(violations)) {}

Eigenstructure RunConfig::eigenstructure() const {
    if (!lambda_values.empty()) return Eigenstructure::explicit_list(lambda_values, eta);
    return Eigenstructure::power_law(lambda_c, lambda_rho, eta, lambda_offset);
}

double RunConfig::resolved_drift_theta() const {
    if (drift_theta) return *drift_theta;
    if (drift_kind == DriftSpec::Kind::Zero || !lambda_values.empty()) return 0.0;
    return resolve_exponent(sigma_F + 1.0 / (2.0 * lambda_rho), 1.0);
}

double RunConfig::resolved_half_theta() const {
    if (half_theta) return *half_theta;
    if (!lambda_values.empty()) return 0.0;
    return resolve_exponent(delta + 1.0 / (2.0 * lambda_rho), 0.5);
}

double RunConfig::resolved_theta() const { return std::max(resolved_drift_theta(), 2.0 * resolved_half_theta()); }

double RunConfig::resolved_rho_strong() const {
    return bound_rho_strong ? *bound_rho_strong : 0.99 * (1.0 - bound_vartheta) / 2.0;
}

Model RunConfig::model() const {
    Model m{eigenstructure(), {}, {}};
    m.drift.kind = drift_kind;
    m.drift.profile = drift_profile;
    m.drift.sigma_F = sigma_F;
    m.drift.theta = resolved_drift_theta();
    m.diffusion.kind = diffusion_kind;
    m.diffusion.profile = diffusion_profile;
    m.diffusion.delta = delta;
    m.diffusion.amplitude = amplitude;
    m.diffusion.half_theta = resolved_half_theta();
    return m;
}

SimConfig RunConfig::sim_config() const {
    SimConfig s;
    s.T = T;
    s.steps = steps;
    s.n_galerkin = n_list.empty() ? 1 : n_list.back();
    s.n_ref = n_ref;
    s.noise_modes = noise_modes;
    s.kappa = kappa;
    s.samples = samples;
    s.seed = seed;
    s.scheme = scheme;
    return s;
}

bool RunConfig::use_oracle() const {
    if (sweep == SweepChoice::Oracle) return true;
    if (sweep == SweepChoice::MonteCarlo) return false;
    return drift_kind == DriftSpec::Kind::Zero && diffusion_kind == DiffusionSpec::Kind::AdditiveDiagonal &&
           kappa == 0.0;
}

std::vector<std::string> validate_config(const RunConfig& c) {
    std::vector<std::string> v;
    auto need = [&v](bool ok, const std::string& msg) {
        if (!ok) v.push_back(msg);
    };
    const bool power_law = c.lambda_values.empty();
    if (power_law) {
        need(c.lambda_c > 0.0, "domain.lambda.c must be > 0");
        need(c.lambda_rho > 0.0, "domain.lambda.rho must be > 0");
    } else {
        for (std::size_t i = 0; i < c.lambda_values.size(); ++i) {
            if (!(c.lambda_values[i] < c.eta)) {
                v.push_back("domain.lambda.values entry " + std::to_string(i + 1) + " must lie below domain.eta");
            }
        }
        need(c.n_ref <= c.lambda_values.size(), "sim.N_ref exceeds the number of entries in domain.lambda.values");
    }
    need(c.eta >= 0.0, "domain.eta must be >= 0");
    need(c.T > 0.0, "sim.T must be > 0");
    need(c.steps >= 1, "sim.steps must be >= 1");
    need(c.n_ref >= 1, "sim.N_ref must be >= 1");
    need(c.samples >= 1, "sim.samples must be >= 1");
    need(c.kappa >= 0.0 && c.kappa <= 1.0, "sim.kappa must lie in [0, 1]");
    need(!c.n_list.empty(), "galerkin.N_list must not be empty");
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
        if (c.n_list[i] < 1) v.push_back("galerkin.N_list entries must be >= 1");
        if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) {
            v.push_back("galerkin.N_list must be strictly ascending");
            break;
        }
    }
    if (!c.n_list.empty() && !c.use_oracle()) {
        need(c.n_list.back() <= c.n_ref, "galerkin.N_list maximum must not exceed sim.N_ref for Monte Carlo sweeps");
    }
    if (power_law && c.lambda_rho > 0.0) {
        double limit = 0.5 - 1.0 / (2.0 * c.lambda_rho);
        if (!(c.delta < limit)) {
            std::ostringstream msg;
            msg << "diffusion.delta = " << c.delta << " violates delta < 1/2 - 1/(2 rho) = " << limit
                << " at domain.lambda.rho = " << c.lambda_rho;
            v.push_back(msg.str());
        }
    }
    need(c.amplitude >= 0.0, "diffusion.amplitude must be >= 0");
    if (c.drift_theta) need(*c.drift_theta >= 0.0 && *c.drift_theta < 1.0, "drift.theta must lie in [0, 1)");
    if (c.half_theta) need(*c.half_theta >= 0.0 && *c.half_theta < 0.5, "diffusion.half_theta must lie in [0, 1/2)");
    need(!c.kappa_list.empty(), "moll.kappa_list must not be empty");
    for (double k : c.kappa_list) {
        if (!(k > 0.0 && k <= 1.0)) {
            v.push_back("moll.kappa_list entries must lie in (0, 1]");
            break;
        }
    }
    need(c.tail_tol > 0.0, "analytics.tail_tol must be > 0");
    need(c.bound_vartheta >= 0.0 && c.bound_vartheta < 1.0, "bounds.vartheta must lie in [0, 1)");
    need(c.bound_p >= 2.0, "bounds.p must be >= 2");
    double rs = c.resolved_rho_strong();
    need(rs >= 0.0 && rs < (1.0 - c.bound_vartheta) / 2.0, "bounds.rho_strong must lie in [0, (1 - bounds.vartheta)/2)");
    need(c.bound_rho_weak >= 0.0 && c.bound_rho_weak < 1.0 - c.bound_vartheta,
         "bounds.rho_weak must lie in [0, 1 - bounds.vartheta)");
    if (c.bound_varsigma) need(*c.bound_varsigma >= 1.0, "bounds.varsigma must be >= 1");
    if (c.bound_F_c1b) need(*c.bound_F_c1b >= 0.0, "bounds.F_c1b must be >= 0");
    if (c.bound_B_c1b) need(*c.bound_B_c1b >= 0.0, "bounds.B_c1b must be >= 0");
    if (c.bound_c) {
        for (double x : *c.bound_c) {
            if (!(x >= 0.0)) {
                v.push_back("bounds.c entries must be >= 0");
                break;
            }
        }
    }
    need(c.identity_N >= 1 && c.identity_N <= c.n_ref, "identity.N must lie in 1..sim.N_ref");
    need(!c.output_dir.empty(), "output.dir must not be empty");

    if (v.empty()) {
        try {
            Model m = c.model();
            validate_model(m);
            validate_sim_config(c.sim_config(), m);
        } catch (const DomainError& e) {
            v.push_back(std::string("model: ") + e.what());
        }
    }
    return v;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::vector<std::string> violations;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    const auto& table = key_table();
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        std::string where = "line " + std::to_string(lineno);
        if (eq == std::string::npos) {
            violations.push_back(where + ": expected 'key = value'");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = table.find(key);
        if (it == table.end()) {
            violations.push_back(key + " (" + where + "): unknown key");
            continue;
        }
        if (seen.count(key)) {
            violations.push_back(key + " (" + where + "): duplicate of line " + std::to_string(seen[key]));
            continue;
        }
        seen[key] = lineno;
        try {
            it->second.set(cfg, value);
        } catch (const std::exception& e) {
            violations.push_back(key + " (" + where + "): " + e.what());
        }
    }
    if (!violations.empty()) throw ConfigError(violations);
    auto semantic = validate_config(cfg);
    if (!semantic.empty()) throw ConfigError(semantic);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot read config file '" + path.string() + "'"});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_form(const RunConfig& cfg) {
    std::string out;
    for (const auto& [key, spec] : key_table()) out += key + " = " + spec.get(cfg) + "\n";
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_form(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace seelab
