#pragma once

#include "wilton/cotangent.hpp"
#include "wilton/moment_lab.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace wilton {

enum class ReportFormat { csv, json };

/// Raised when a report cannot be written; the CLI maps it to exit code 3.
class ReportWriteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form ("%.17g").
std::string format_number(double v);

/// integrand,k,measure,samples,seed,value,stderr,ratio_to_2gamma
std::string moments_csv(const std::vector<MomentEstimate>& rows);

/// b,A0,A1,k,Hk,count
std::string cotangent_csv(const CotangentMomentRun& run);

/// k,rho,ratio_to_inv_pi2
std::string radius_csv(const RadiusProfile& profile);

nlohmann::json to_json(const MomentEstimate& e);
MomentEstimate moment_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CotangentMomentRun& run);
CotangentMomentRun cotangent_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RadiusProfile& profile);

/// {"config": ..., "results": [...]}
std::string moments_report_json(const nlohmann::json& config, const std::vector<MomentEstimate>& rows);

/// Parses the "results" array of moments_report_json.
std::vector<MomentEstimate> parse_moments_report(const std::string& text);

/// Writes text to path ("-" is not special). Throws ReportWriteError.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace wilton
