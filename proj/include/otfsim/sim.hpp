#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "otfsim/channel.hpp"
#include "otfsim/pattern.hpp"

namespace otfsim {

/// Configuration error carrying the offending key.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class PropagationMode { kIdeal, kTime };
enum class AngleMode { kGenie, kScan };

struct ExperimentConfig {
    // frame geometry (desk scale by default; --full switches to M=512, N=128)
    int M = 64;
    int N = 32;
    double delta_f_hz = 15e3;
    double carrier_hz = 4e9;
    double eta_over_lambda = 0.45;
    std::vector<int> antennas = {32, 128};

    // channel
    std::string profile = "P4";  // P4 | P6 | custom
    std::vector<double> profile_delays_ns;
    std::vector<double> profile_powers_db;
    std::vector<int> paths_per_tap;  // Q_p; empty -> 1 per tap
    std::vector<double> velocities_kmh = {30.0, 120.0, 500.0};
    bool resample_degenerate_angles = true;  // redraw arrivals the array cannot resolve
    int l_max = -1;   // -1 -> ceil(M*delta_f*tau_max) from the profile
    int k_max = -1;   // -1 -> ceil(N*T*f_d) from the velocity
    int cp_len = -1;  // -1 -> l_max

    // signal / sweep
    std::vector<double> snr_db = {0, 4, 8, 12, 16, 20};
    double snr_p_db = 40.0;
    std::vector<double> snr_p_db_sweep = {20, 25, 30, 35, 40};
    double mse_data_snr_db = 20.0;
    int mod_order = 4;
    std::string pattern = "proposed";

    // execution
    int trials = 200;
    std::uint64_t seed = 12345;
    PropagationMode mode = PropagationMode::kIdeal;
    AngleMode angles = AngleMode::kGenie;

    // scan policy
    int grid_size = 0;  // 0 -> 4*E
    double threshold_ratio = 0.5;
    double merge_width_factor = 1.0;

    // oracle toggles
    bool oracle_check = false;  // cross-check ideal propagation vs. the DD matrix
    int oracle_cap = 4096;      // max M*N for dense-matrix work

    static ExperimentConfig defaults() { return {}; }
    static ExperimentConfig from_file(const std::string& path);

    /// Applies one "key = value" assignment; throws ConfigError for
    /// unknown keys or malformed values.
    void set(const std::string& key, const std::string& value);

    void apply_full_scale();
    void validate() const;  // throws ConfigError

    DelayProfile resolved_profile() const;
    FrameParams frame_params(int E) const;
    int resolved_l_max() const;
    int resolved_k_max(double v_kmh) const;
};

struct ResultRecord {
    std::string experiment;
    std::string metric;  // BER | SER | MSE | runtime_s | overhead_count | ...
    double snr_db = std::numeric_limits<double>::quiet_NaN();
    double snr_p_db = std::numeric_limits<double>::quiet_NaN();
    double velocity_kmh = std::numeric_limits<double>::quiet_NaN();
    int antennas = 0;  // 0 -> blank
    std::string pattern;
    double value = 0.0;
    double ci_half_width = std::numeric_limits<double>::quiet_NaN();
    long trials = 0;
    std::uint64_t seed = 0;
};

/// Wilson score interval for a binomial proportion (z = 1.96).
struct Interval {
    double lo = 0.0, hi = 0.0;
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};
Interval wilson_interval(double errors, double n);
double wilson_half_width(double errors, double n);

// Experiment drivers. All are deterministic functions of (config, seed).
std::vector<ResultRecord> run_ber(const ExperimentConfig& cfg);
std::vector<ResultRecord> run_mse(const ExperimentConfig& cfg);
std::vector<ResultRecord> run_overhead(const ExperimentConfig& cfg);
std::vector<ResultRecord> run_arraygain(const ExperimentConfig& cfg);
std::vector<ResultRecord> run_scaling(const ExperimentConfig& cfg);

/// Oracle-equivalence suite; prints one PASS/FAIL line per invariant and
/// returns the number of failures.
int run_selftest(const ExperimentConfig& cfg, std::ostream& out);

// Single-trial results, exposed for the drivers, tests, and bindings.
struct TrialResult {
    long bit_errors = 0;
    long bits = 0;
    long symbol_errors = 0;
    long symbols = 0;
    double mse_num = 0.0;  // sum |beta_hat - beta|^2 over paths
    double mse_den = 0.0;  // sum |beta|^2
    int detected_branches = 0;
};

TrialResult run_trial(const ExperimentConfig& cfg, const FrameParams& params,
                      double v_kmh, double snr_db, double snr_p_db, std::uint64_t trial_seed);

// Deterministic output formatting (12 significant digits).
std::string format_value(double v);
std::string records_to_csv(const std::vector<ResultRecord>& records);
std::string records_to_json(const std::vector<ResultRecord>& records);
void write_records(const std::vector<ResultRecord>& records, const std::string& out_dir,
                   const std::string& name, const std::string& format);

}  // namespace otfsim
