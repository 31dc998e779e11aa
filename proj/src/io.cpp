#include "seelab/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "seelab/errors.hpp"

namespace seelab {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        cells.push_back(cell);
    }
    return cells;
}

double cell_real(const std::string& s, std::size_t row, const std::string& column) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw DomainError("curve CSV row " + std::to_string(row) + ": column '" + column + "' is not a number");
    }
    return v;
}

nlohmann::ordered_json real_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string curve_csv(const ErrorCurve& curve, const std::string& experiment_id, std::uint64_t seed) {
    std::string out = "experiment_id,N,gap,error,stderr,samples,dt,kappa,seed\n";
    for (const auto& p : curve.points) {
        out += experiment_id + "," + std::to_string(p.N) + "," + format_real(p.gap) + "," + format_real(p.error) + "," +
               format_real(p.std_error) + "," + std::to_string(p.samples) + "," + format_real(p.dt) + "," +
               format_real(p.kappa) + "," + std::to_string(seed) + "\n";
    }
    return out;
}

ErrorCurve parse_curve_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DomainError("curve CSV is empty");
    auto header = split_csv_row(line);
    auto column = [&](const std::string& name) -> long {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<long>(i);
        }
        return -1;
    };
    long cN = column("N"), cgap = column("gap"), cerr = column("error");
    if (cN < 0 || cgap < 0 || cerr < 0) throw DomainError("curve CSV needs the columns N, gap and error");
    long cse = column("stderr"), csm = column("samples"), cdt = column("dt"), ck = column("kappa");
    ErrorCurve curve;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto cells = split_csv_row(line);
        if (cells.size() != header.size()) {
            throw DomainError("curve CSV row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                              " cells");
        }
        ErrorPoint p;
        p.N = static_cast<std::size_t>(cell_real(cells[cN], row, "N"));
        p.gap = cell_real(cells[cgap], row, "gap");
        p.error = cell_real(cells[cerr], row, "error");
        if (cse >= 0) p.std_error = cell_real(cells[cse], row, "stderr");
        if (csm >= 0) p.samples = static_cast<std::size_t>(cell_real(cells[csm], row, "samples"));
        if (cdt >= 0) p.dt = cell_real(cells[cdt], row, "dt");
        if (ck >= 0) p.kappa = cell_real(cells[ck], row, "kappa");
        curve.points.push_back(p);
    }
    return curve;
}

ErrorCurve read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot read curve file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_curve_csv(ss.str());
}

nlohmann::ordered_json to_json(const RateFit& fit) {
    nlohmann::ordered_json j;
    j["slope"] = real_or_null(fit.slope);
    j["intercept"] = real_or_null(fit.intercept);
    j["r_squared"] = real_or_null(fit.r_squared);
    j["slope_stderr"] = real_or_null(fit.slope_stderr);
    j["points_used"] = fit.points_used;
    return j;
}

nlohmann::ordered_json to_json(const ErrorCurve& curve) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : curve.points) {
        nlohmann::ordered_json j;
        j["N"] = p.N;
        j["gap"] = real_or_null(p.gap);
        j["error"] = real_or_null(p.error);
        j["stderr"] = real_or_null(p.std_error);
        j["samples"] = p.samples;
        j["dt"] = real_or_null(p.dt);
        j["kappa"] = real_or_null(p.kappa);
        arr.push_back(j);
    }
    return arr;
}

nlohmann::ordered_json to_json(const ResultRecord& r) {
    nlohmann::ordered_json j;
    j["experiment_id"] = r.experiment_id;
    j["timestamp"] = r.timestamp;
    j["config_hash"] = r.config_hash;
    j["curves"] = nlohmann::ordered_json::object();
    for (const auto& [k, c] : r.curves) j["curves"][k] = to_json(c);
    j["fits"] = nlohmann::ordered_json::object();
    for (const auto& [k, f] : r.fits) j["fits"][k] = to_json(f);
    j["oracle_values"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.oracle_values) {
        auto arr = nlohmann::ordered_json::array();
        for (double x : v) arr.push_back(real_or_null(x));
        j["oracle_values"][k] = arr;
    }
    j["bound_values"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.bound_values) {
        auto arr = nlohmann::ordered_json::array();
        for (double x : v) arr.push_back(real_or_null(x));
        j["bound_values"][k] = arr;
    }
    j["flags"] = r.flags;
    return j;
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::filesystem::path write_artifact(const std::filesystem::path& dir, const std::string& name,
                                     const std::string& content) {
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    return path;
}

}  // namespace seelab
