#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "otfsim/sim.hpp"

namespace otfsim {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config: invalid number for key '" + key + "': '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config: invalid integer for key '" + key + "': '" + v + "'");
    }
}

int parse_auto_int(const std::string& key, const std::string& v) {
    if (v == "auto") return -1;
    return static_cast<int>(parse_long(key, v));
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const std::string& item : split_list(v)) out.push_back(parse_double(key, item));
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const std::string& item : split_list(v))
        out.push_back(static_cast<int>(parse_long(key, item)));
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw ConfigError("config: invalid boolean for key '" + key + "': '" + v + "'");
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (key == "M") M = static_cast<int>(parse_long(key, value));
    else if (key == "N") N = static_cast<int>(parse_long(key, value));
    else if (key == "delta_f_hz") delta_f_hz = parse_double(key, value);
    else if (key == "carrier_hz") carrier_hz = parse_double(key, value);
    else if (key == "eta_over_lambda") eta_over_lambda = parse_double(key, value);
    else if (key == "antennas") antennas = parse_int_list(key, value);
    else if (key == "profile") profile = value;
    else if (key == "profile_delays_ns") profile_delays_ns = parse_double_list(key, value);
    else if (key == "profile_powers_db") profile_powers_db = parse_double_list(key, value);
    else if (key == "paths_per_tap") paths_per_tap = parse_int_list(key, value);
    else if (key == "velocities_kmh") velocities_kmh = parse_double_list(key, value);
    else if (key == "degenerate_angles") {
        if (value == "resample") resample_degenerate_angles = true;
        else if (value == "keep") resample_degenerate_angles = false;
        else throw ConfigError("config: invalid value for key 'degenerate_angles': '" + value + "'");
    }
    else if (key == "l_max") l_max = parse_auto_int(key, value);
    else if (key == "k_max") k_max = parse_auto_int(key, value);
    else if (key == "cp_len") cp_len = parse_auto_int(key, value);
    else if (key == "snr_db") snr_db = parse_double_list(key, value);
    else if (key == "snr_p_db") snr_p_db = parse_double(key, value);
    else if (key == "snr_p_db_sweep") snr_p_db_sweep = parse_double_list(key, value);
    else if (key == "mse_data_snr_db") mse_data_snr_db = parse_double(key, value);
    else if (key == "mod_order") mod_order = static_cast<int>(parse_long(key, value));
    else if (key == "pattern") pattern = value;
    else if (key == "trials") trials = static_cast<int>(parse_long(key, value));
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_long(key, value));
    else if (key == "mode") {
        if (value == "ideal") mode = PropagationMode::kIdeal;
        else if (value == "time") mode = PropagationMode::kTime;
        else throw ConfigError("config: invalid value for key 'mode': '" + value + "'");
    } else if (key == "angles") {
        if (value == "genie") angles = AngleMode::kGenie;
        else if (value == "scan") angles = AngleMode::kScan;
        else throw ConfigError("config: invalid value for key 'angles': '" + value + "'");
    } else if (key == "grid_size") grid_size = static_cast<int>(parse_long(key, value));
    else if (key == "threshold_ratio") threshold_ratio = parse_double(key, value);
    else if (key == "merge_width_factor") merge_width_factor = parse_double(key, value);
    else if (key == "oracle_check") oracle_check = parse_bool(key, value);
    else if (key == "oracle_cap") oracle_cap = static_cast<int>(parse_long(key, value));
    else throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");

    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::apply_full_scale() {
    M = 512;
    N = 128;
    antennas = {32, 64, 128, 256};
}

void ExperimentConfig::validate() const {
    if (M < 1 || N < 1) throw ConfigError("config: 'M' and 'N' must be >= 1");
    if (delta_f_hz <= 0) throw ConfigError("config: 'delta_f_hz' must be > 0");
    if (carrier_hz <= 0) throw ConfigError("config: 'carrier_hz' must be > 0");
    if (eta_over_lambda <= 0) throw ConfigError("config: 'eta_over_lambda' must be > 0");
    if (antennas.empty()) throw ConfigError("config: 'antennas' must be non-empty");
    for (int e : antennas)
        if (e < 1) throw ConfigError("config: 'antennas' entries must be >= 1");
    if (velocities_kmh.empty()) throw ConfigError("config: 'velocities_kmh' must be non-empty");
    if (snr_db.empty()) throw ConfigError("config: 'snr_db' must be non-empty");
    if (snr_p_db_sweep.empty()) throw ConfigError("config: 'snr_p_db_sweep' must be non-empty");
    if (mod_order != 4 && mod_order != 16)
        throw ConfigError("config: 'mod_order' must be 4 or 16");
    if (trials < 1) throw ConfigError("config: 'trials' must be >= 1");
    if (threshold_ratio <= 0.0 || threshold_ratio > 1.0)
        throw ConfigError("config: 'threshold_ratio' must be in (0, 1]");
    if (merge_width_factor <= 0.0)
        throw ConfigError("config: 'merge_width_factor' must be > 0");
    if (grid_size < 0) throw ConfigError("config: 'grid_size' must be >= 0");
    if (oracle_cap < 1) throw ConfigError("config: 'oracle_cap' must be >= 1");
    try {
        pattern_from_string(pattern);
    } catch (const std::exception&) {
        throw ConfigError("config: invalid value for key 'pattern': '" + pattern + "'");
    }
    if (profile == "custom") {
        if (profile_delays_ns.empty() || profile_delays_ns.size() != profile_powers_db.size())
            throw ConfigError("config: custom profile needs matching 'profile_delays_ns' and 'profile_powers_db'");
    } else {
        try {
            DelayProfile::preset(profile);
        } catch (const std::exception&) {
            throw ConfigError("config: invalid value for key 'profile': '" + profile + "'");
        }
    }
    if (!paths_per_tap.empty()) {
        size_t taps = profile == "custom" ? profile_delays_ns.size()
                                          : DelayProfile::preset(profile).delay_ns.size();
        if (paths_per_tap.size() != taps)
            throw ConfigError("config: 'paths_per_tap' size does not match the profile");
    }
}

DelayProfile ExperimentConfig::resolved_profile() const {
    if (profile == "custom") {
        DelayProfile p;
        p.name = "custom";
        p.delay_ns = profile_delays_ns;
        p.power_db = profile_powers_db;
        return p;
    }
    return DelayProfile::preset(profile);
}

int ExperimentConfig::resolved_l_max() const {
    if (l_max >= 0) return l_max;
    const DelayProfile p = resolved_profile();
    double tau_max = 0.0;
    for (double d : p.delay_ns) tau_max = std::max(tau_max, d * 1e-9);
    return static_cast<int>(std::ceil(M * delta_f_hz * tau_max));
}

int ExperimentConfig::resolved_k_max(double v_kmh) const {
    if (k_max >= 0) return k_max;
    const double lambda = kSpeedOfLight / carrier_hz;
    const double f_d = (v_kmh / 3.6) / lambda;
    return static_cast<int>(std::ceil(N * (1.0 / delta_f_hz) * f_d));
}

FrameParams ExperimentConfig::frame_params(int E) const {
    const int cp = cp_len >= 0 ? cp_len : resolved_l_max();
    return make_params(M, N, delta_f_hz, carrier_hz, E, eta_over_lambda, cp);
}

}  // namespace otfsim
