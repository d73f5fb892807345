#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "otfsim/frame.hpp"

namespace otfsim {

/// Tapped delay line profile: one entry per tap, delays in ns, mean
/// powers in dB (normalized at sampling time).
struct DelayProfile {
    std::string name;
    std::vector<double> delay_ns;
    std::vector<double> power_db;

    int taps() const { return static_cast<int>(delay_ns.size()); }

    /// Built-in presets "P4" and "P6". Throws on unknown name.
    static const DelayProfile& preset(std::string_view name);
};

/// One propagation path: tap index, continuous delay/Doppler, angle of
/// arrival, complex gain, and the rounded grid indices
///   l = round(M*delta_f*tau), k = round(N*T*nu)   (round = floor(x+0.5)).
struct PathSpec {
    int tap = 0;
    double tau = 0.0;        // s
    double nu = 0.0;         // Hz, nu = f_d*cos(theta)
    double theta = 0.0;      // rad, in [0, 2pi)
    cplx beta;               // complex gain draw
    double mean_power = 1.0; // E[|beta|^2]; sums to exactly 1 over paths
    int l = 0;
    int k = 0;

    double u() const { return std::cos(theta); }
};

struct ChannelRealization {
    std::vector<PathSpec> paths;
    int P = 0;         // tap count
    double f_d = 0.0;  // max Doppler (Hz)
    int l_max = 0;     // delay support bound, ceil(M*delta_f*tau_max)
    int k_max = 0;     // Doppler support bound, ceil(N*T*f_d)

    int path_count() const { return static_cast<int>(paths.size()); }  // B
};

struct ChannelSamplingOptions {
    /// Paths per tap Q_p (empty means one per tap). Size must match the
    /// profile when non-empty.
    std::vector<int> paths_per_tap;

    /// Pairs with |cos(theta_a)-cos(theta_b)| below this are resampled
    /// (unresolvable by the array). Negative means "use the mainlobe
    /// width 2*lambda/(E*eta)". Set resample_degenerate=false to keep them.
    double min_delta_u = -1.0;
    bool resample_degenerate = true;

    /// Additionally require pairwise-distinct (l,k) shifts (used by the
    /// estimator-exactness tests).
    bool require_distinct_shifts = false;

    int max_attempts = 1000;
};

/// Draws one channel realization: per path theta ~ U[0,2pi),
/// nu = f_d*cos(theta) with f_d = (v/3.6)/lambda, beta ~ CN(0, w_p) with
/// tap weights from the dB profile split across Q_p paths and normalized
/// so the total mean power is exactly 1.
ChannelRealization sample_channel(const DelayProfile& profile, double v_kmh,
                                  const FrameParams& params, Rng& rng,
                                  const ChannelSamplingOptions& opts = {});

/// Noiseless delay-Doppler propagation to one antenna under the ideal
/// (bi-orthogonal) model:
///   y_i[l,k] = sum_p beta_p e^{j phi_i cos theta_p} e^{-j2pi l_p k_p/(MN)}
///              x[[l-l_p]_M, [k-k_p]_N]
DDFrame propagate_ideal(const DDFrame& x, const ChannelRealization& ch,
                        const FrameParams& params, int antenna);

/// All E antennas at once.
std::vector<DDFrame> propagate_ideal_all(const DDFrame& x, const ChannelRealization& ch,
                                         const FrameParams& params);

/// Sampled time-domain propagation, one output body per antenna:
///   r_i[t] = sum_p beta_p e^{j phi_i cos theta_p}
///            e^{j2pi nu_p (t - l_p)/(M delta_f)} s_p[t]
/// where s_p is the body delayed by l_p samples circularly within each
/// symbol (the discrete ideal delay; the prefix covers the shifted
/// samples) and nu_p is the continuous Doppler. Requires cp_len >= max
/// path delay index; throws std::invalid_argument otherwise. Outputs are
/// prefix-stripped bodies of length M*N.
std::vector<TimeSignal> propagate_time(const TimeSignal& s, const ChannelRealization& ch,
                                       const FrameParams& params);

/// Adds i.i.d. CN(0, sigma2) per sample/cell (valid in the DD domain
/// because every transform in the chain is unitary).
void add_noise(TimeSignal& sig, double sigma2, Rng& rng);
void add_noise(DDFrame& frame, double sigma2, Rng& rng);

/// Dense MN x MN matrix H with vec(y) = H vec(x) for antenna 0 (no array
/// phase); vec stacks cells l-fastest. Each path contributes one entry
/// per row. Throws std::invalid_argument when M*N exceeds max_grid.
Eigen::MatrixXcd build_dd_channel_matrix(const ChannelRealization& ch,
                                         const FrameParams& params, int max_grid = 4096);

/// Maximum Doppler for a terminal speed in km/h.
double max_doppler_hz(double v_kmh, const FrameParams& params);

}  // namespace otfsim
