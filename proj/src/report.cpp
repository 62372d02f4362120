#include "wilton/report.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace wilton {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string moments_csv(const std::vector<MomentEstimate>& rows) {
    std::ostringstream os;
    os << "integrand,k,measure,samples,seed,value,stderr,ratio_to_2gamma\n";
    for (const auto& e : rows)
        os << e.integrand << ',' << e.k << ',' << to_string(e.measure) << ',' << e.samples << ',' << e.seed << ','
           << format_number(e.value) << ',' << format_number(e.std_error) << ','
           << format_number(e.ratio_to_2gamma) << '\n';
    return os.str();
}

std::string cotangent_csv(const CotangentMomentRun& run) {
    std::ostringstream os;
    os << "b,A0,A1,k,Hk,count\n";
    for (int k : run.ks)
        os << run.b << ',' << format_number(run.A0) << ',' << format_number(run.A1) << ',' << k << ','
           << format_number(run.hk.at(k)) << ',' << run.count << '\n';
    return os.str();
}

std::string radius_csv(const RadiusProfile& profile) {
    std::ostringstream os;
    os << "k,rho,ratio_to_inv_pi2\n";
    const double inv_pi2 = 1.0 / (std::numbers::pi * std::numbers::pi);
    for (const auto& [k, rho] : profile.rho)
        os << k << ',' << format_number(rho) << ',' << format_number(rho / inv_pi2) << '\n';
    return os.str();
}

nlohmann::json to_json(const MomentEstimate& e) {
    return {{"integrand", e.integrand},
            {"k", e.k},
            {"measure", to_string(e.measure)},
            {"value", e.value},
            {"stderr", e.std_error},
            {"samples", e.samples},
            {"seed", e.seed},
            {"ratio_to_2gamma", e.ratio_to_2gamma},
            {"rejected", e.rejected},
            {"rejection_warning", e.rejection_warning}};
}

MomentEstimate moment_from_json(const nlohmann::json& j) {
    MomentEstimate e;
    e.integrand = j.at("integrand").get<std::string>();
    e.k = j.at("k").get<int>();
    const auto m = j.at("measure").get<std::string>();
    if (m != "gauss" && m != "lebesgue") throw std::invalid_argument("unknown measure '" + m + "'");
    e.measure = m == "gauss" ? Measure::gauss : Measure::lebesgue;
    e.value = j.at("value").get<double>();
    e.std_error = j.at("stderr").get<double>();
    e.samples = j.at("samples").get<std::uint64_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.ratio_to_2gamma = j.at("ratio_to_2gamma").get<double>();
    e.rejected = j.value("rejected", std::uint64_t{0});
    e.rejection_warning = j.value("rejection_warning", false);
    return e;
}

nlohmann::json to_json(const CotangentMomentRun& run) {
    nlohmann::json hk = nlohmann::json::object();
    for (const auto& [k, v] : run.hk) hk[std::to_string(k)] = v;
    return {{"b", run.b}, {"A0", run.A0},     {"A1", run.A1},   {"ks", run.ks},
            {"hk", hk},   {"count", run.count}, {"phi", run.phi}};
}

CotangentMomentRun cotangent_from_json(const nlohmann::json& j) {
    CotangentMomentRun run;
    run.b = j.at("b").get<std::int64_t>();
    run.A0 = j.at("A0").get<double>();
    run.A1 = j.at("A1").get<double>();
    run.ks = j.at("ks").get<std::vector<int>>();
    for (const auto& [key, v] : j.at("hk").items()) run.hk[std::stoi(key)] = v.get<double>();
    run.count = j.at("count").get<std::int64_t>();
    run.phi = j.value("phi", std::int64_t{0});
    return run;
}

nlohmann::json to_json(const RadiusProfile& profile) {
    nlohmann::json rho = nlohmann::json::object();
    for (const auto& [k, v] : profile.rho) rho[std::to_string(k)] = v;
    return {{"rho", rho}, {"degenerate", profile.degenerate}};
}

std::string moments_report_json(const nlohmann::json& config, const std::vector<MomentEstimate>& rows) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& e : rows) results.push_back(to_json(e));
    return nlohmann::json{{"config", config}, {"results", results}}.dump(2) + "\n";
}

std::vector<MomentEstimate> parse_moments_report(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<MomentEstimate> rows;
    for (const auto& r : j.at("results")) rows.push_back(moment_from_json(r));
    return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportWriteError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw ReportWriteError("failed writing '" + path + "'");
}

}  // namespace wilton
