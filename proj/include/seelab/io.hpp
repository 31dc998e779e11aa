#pragma once

// CSV and JSON persistence. Reals are written with 17 significant digits and
// columns in a fixed order, so equal inputs give equal bytes.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "seelab/experiments.hpp"

namespace seelab {

/// Header: experiment_id,N,gap,error,stderr,samples,dt,kappa,seed
std::string curve_csv(const ErrorCurve& curve, const std::string& experiment_id, std::uint64_t seed);
/// Reads the columns N, gap, error (and stderr, samples, dt, kappa when present) by header name.
ErrorCurve parse_curve_csv(const std::string& text);
ErrorCurve read_curve_csv(const std::filesystem::path& path);

/// Formats a real with 17 significant digits ("nan", "inf" for non-finite values).
std::string format_real(double v);

nlohmann::ordered_json to_json(const RateFit& fit);
nlohmann::ordered_json to_json(const ErrorCurve& curve);

struct ResultRecord {
    std::string experiment_id;
    /// UTC, ISO 8601.
    std::string timestamp;
    std::string config_hash;
    std::map<std::string, ErrorCurve> curves;
    std::map<std::string, RateFit> fits;
    std::map<std::string, std::vector<double>> oracle_values;
    std::map<std::string, std::vector<double>> bound_values;
    std::map<std::string, bool> flags;
};

nlohmann::ordered_json to_json(const ResultRecord& record);
std::string utc_timestamp();

/// Writes `content` to dir/name, creating dir; returns the path.
std::filesystem::path write_artifact(const std::filesystem::path& dir, const std::string& name,
                                     const std::string& content);

}  // namespace seelab
