#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "otfsim/sim.hpp"

namespace otfsim {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string csv_field(double v) { return std::isnan(v) ? "" : format_value(v); }

}  // namespace

std::string records_to_csv(const std::vector<ResultRecord>& records) {
    std::string out =
        "experiment,metric,snr_db,snr_p_db,velocity_kmh,antennas,pattern,value,"
        "ci_half_width,trials,seed\n";
    for (const ResultRecord& r : records) {
        out += r.experiment;
        out += ',';
        out += r.metric;
        out += ',';
        out += csv_field(r.snr_db);
        out += ',';
        out += csv_field(r.snr_p_db);
        out += ',';
        out += csv_field(r.velocity_kmh);
        out += ',';
        out += r.antennas > 0 ? std::to_string(r.antennas) : "";
        out += ',';
        out += r.pattern;
        out += ',';
        out += format_value(r.value);
        out += ',';
        out += csv_field(r.ci_half_width);
        out += ',';
        out += std::to_string(r.trials);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

std::string records_to_json(const std::vector<ResultRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ResultRecord& r : records) {
        nlohmann::ordered_json j;
        j["experiment"] = r.experiment;
        j["metric"] = r.metric;
        j["snr_db"] = std::isnan(r.snr_db) ? nlohmann::ordered_json() : nlohmann::ordered_json(r.snr_db);
        j["snr_p_db"] =
            std::isnan(r.snr_p_db) ? nlohmann::ordered_json() : nlohmann::ordered_json(r.snr_p_db);
        j["velocity_kmh"] = std::isnan(r.velocity_kmh) ? nlohmann::ordered_json()
                                                       : nlohmann::ordered_json(r.velocity_kmh);
        j["antennas"] =
            r.antennas > 0 ? nlohmann::ordered_json(r.antennas) : nlohmann::ordered_json();
        j["pattern"] = r.pattern;
        j["value"] = r.value;
        j["ci_half_width"] = std::isnan(r.ci_half_width) ? nlohmann::ordered_json()
                                                         : nlohmann::ordered_json(r.ci_half_width);
        j["trials"] = r.trials;
        j["seed"] = r.seed;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

void write_records(const std::vector<ResultRecord>& records, const std::string& out_dir,
                   const std::string& name, const std::string& format) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / (name + "." + format)).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << (format == "json" ? records_to_json(records) : records_to_csv(records));
}

Interval wilson_interval(double errors, double n) {
    if (n <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;  // 97.5th normal percentile
    const double p = errors / n;
    const double z2n = z * z / n;
    const double center = (p + z2n / 2.0) / (1.0 + z2n);
    const double hw = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n);
    return {center - hw, center + hw};
}

double wilson_half_width(double errors, double n) {
    Interval iv = wilson_interval(errors, n);
    return (iv.hi - iv.lo) / 2.0;
}

}  // namespace otfsim
