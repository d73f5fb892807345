#pragma once

#include <span>
#include <vector>

#include "otfsim/channel.hpp"
#include "otfsim/frame.hpp"
#include "otfsim/pattern.hpp"

namespace otfsim {

/// Scan grid over u = cos(angle); strictly increasing, spanning [-1, 1].
struct AngleGrid {
    std::vector<double> u;

    static AngleGrid uniform(int count);
    int count() const { return static_cast<int>(u.size()); }
};

struct ScanPolicy {
    int grid_size = 0;             // 0 -> 4*E
    double threshold_ratio = 0.5;  // of the global peak metric
    double merge_width_factor = 1.0;
};

/// Beamformed signal for one matched direction.
struct BranchSignal {
    double u = 0.0;  // cos of the beam angle
    DDFrame frame;
    double amplitude_metric = 0.0;  // peak |value| over the pilot scan row
};

/// Steering weights w_i = e^{j phi_i u}, phi_i = 2*pi*i*eta/lambda.
/// Throws std::domain_error for |u| > 1.
std::vector<cplx> steering_vector(double u, const FrameParams& params);

/// Spatial matched filter (1/E) sum_i w_i^* r_i; elementwise, so it
/// commutes with the unitary transforms.
DDFrame combine(std::span<const DDFrame> per_antenna, double u, const FrameParams& params);
TimeSignal combine(std::span<const TimeSignal> per_antenna, double u, const FrameParams& params);

/// Normalized array gain between a source direction and a beam direction:
///   G = (1/E) |sin(pi E eta du/lambda)| / |sin(pi eta du/lambda)|,
/// 1 when the directions coincide. Equals the direct geometric sum
/// |(1/E) sum_i e^{j phi_i du}|.
double array_gain(double u_src, double u_beam, const FrameParams& params);

/// Direct-sum evaluation of the same quantity (kept as the cross-check
/// route; O(E)).
double array_gain_direct(double u_src, double u_beam, const FrameParams& params);

/// Mainlobe width in u: 2*lambda/(E*eta).
double mainlobe_width_u(const FrameParams& params);

/// Forms one branch and its detection metric, measured over the pilot
/// scan row l in [l0, l0+l_max] at Doppler row k0 + round(N*T*f_d*u).
BranchSignal make_branch(std::span<const DDFrame> per_antenna, double u,
                         const PilotPattern& pattern, const FrameParams& params, double f_d);

/// Threshold detection of arrival directions: evaluates the metric on
/// every grid point, keeps local maxima above threshold_ratio * peak,
/// merges maxima closer than merge_width_factor * mainlobe width, and
/// returns the surviving u values in ascending order (empty when nothing
/// clears the threshold).
std::vector<double> scan_angles(std::span<const DDFrame> per_antenna, const AngleGrid& grid,
                                const ScanPolicy& policy, const PilotPattern& pattern,
                                const FrameParams& params, double f_d);

/// Oracle branch list: u_b = cos(theta) of every true path, in path order.
std::vector<double> genie_angles(const ChannelRealization& ch);

}  // namespace otfsim
