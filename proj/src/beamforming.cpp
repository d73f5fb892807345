#include "otfsim/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otfsim/rx_dsp.hpp"

namespace otfsim {

AngleGrid AngleGrid::uniform(int count) {
    if (count < 2) throw std::invalid_argument("AngleGrid: need at least 2 points");
    AngleGrid g;
    g.u.resize(count);
    for (int i = 0; i < count; ++i) g.u[i] = -1.0 + 2.0 * i / (count - 1);
    return g;
}

std::vector<cplx> steering_vector(double u, const FrameParams& params) {
    if (std::abs(u) > 1.0) throw std::domain_error("steering_vector: |u| must be <= 1");
    std::vector<cplx> w(params.E);
    for (int i = 0; i < params.E; ++i) w[i] = std::polar(1.0, params.element_phase(i) * u);
    return w;
}

namespace {

template <typename Frame>
void check_combine_args(std::span<const Frame> per_antenna, const FrameParams& params) {
    if (static_cast<int>(per_antenna.size()) != params.E)
        throw std::invalid_argument("combine: signal count does not match E");
}

}  // namespace

DDFrame combine(std::span<const DDFrame> per_antenna, double u, const FrameParams& params) {
    check_combine_args(per_antenna, params);
    const std::vector<cplx> w = steering_vector(u, params);

    DDFrame out(per_antenna[0].rows(), per_antenna[0].cols());
    const double inv_e = 1.0 / params.E;
    for (int i = 0; i < params.E; ++i) {
        if (!out.same_shape(per_antenna[i]))
            throw std::invalid_argument("combine: per-antenna frame shapes differ");
        const cplx wc = std::conj(w[i]) * inv_e;
        const cplx* src = per_antenna[i].data().data();
        cplx* dst = out.data().data();
        for (size_t idx = 0; idx < out.size(); ++idx) dst[idx] += wc * src[idx];
    }
    return out;
}

TimeSignal combine(std::span<const TimeSignal> per_antenna, double u, const FrameParams& params) {
    check_combine_args(per_antenna, params);
    const std::vector<cplx> w = steering_vector(u, params);

    TimeSignal out;
    out.cp_len = per_antenna[0].cp_len;
    out.samples.assign(per_antenna[0].samples.size(), cplx(0.0, 0.0));
    const double inv_e = 1.0 / params.E;
    for (int i = 0; i < params.E; ++i) {
        if (per_antenna[i].samples.size() != out.samples.size() ||
            per_antenna[i].cp_len != out.cp_len)
            throw std::invalid_argument("combine: per-antenna signal shapes differ");
        const cplx wc = std::conj(w[i]) * inv_e;
        for (size_t t = 0; t < out.samples.size(); ++t) out.samples[t] += wc * per_antenna[i].samples[t];
    }
    return out;
}

double array_gain(double u_src, double u_beam, const FrameParams& params) {
    if (std::abs(u_src) > 1.0 || std::abs(u_beam) > 1.0)
        throw std::domain_error("array_gain: |u| must be <= 1");
    const double x = kPi * params.eta * (u_src - u_beam) / params.lambda();
    const double denom = std::sin(x);
    // coincident directions (or a grating null of the denominator): ratio -> 1
    if (std::abs(denom) < 1e-15) return 1.0;
    return std::abs(std::sin(params.E * x)) / (params.E * std::abs(denom));
}

double array_gain_direct(double u_src, double u_beam, const FrameParams& params) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < params.E; ++i)
        acc += std::polar(1.0, params.element_phase(i) * (u_src - u_beam));
    return std::abs(acc) / params.E;
}

double mainlobe_width_u(const FrameParams& params) {
    return 2.0 * params.lambda() / (params.E * params.eta);
}

BranchSignal make_branch(std::span<const DDFrame> per_antenna, double u,
                         const PilotPattern& pattern, const FrameParams& params, double f_d) {
    BranchSignal b;
    b.u = u;
    b.frame = combine(per_antenna, u, params);

    const int k_hat = estimate_doppler(u, params, f_d);
    const int row = mod_index(pattern.k0 + k_hat, params.N);
    double peak = 0.0;
    for (int l = pattern.l0; l <= pattern.l0 + pattern.l_max; ++l)
        peak = std::max(peak, std::abs(b.frame.at_mod(l, row)));
    b.amplitude_metric = peak;
    return b;
}

namespace {

/// Detection metric only: combines just the scan-row cells instead of the
/// whole frame.
double scan_metric(std::span<const DDFrame> per_antenna, double u, const PilotPattern& pattern,
                   const FrameParams& params, double f_d) {
    const std::vector<cplx> w = steering_vector(u, params);
    const int k_hat = estimate_doppler(u, params, f_d);
    const int row = mod_index(pattern.k0 + k_hat, params.N);
    const double inv_e = 1.0 / params.E;

    double peak = 0.0;
    for (int l = pattern.l0; l <= pattern.l0 + pattern.l_max; ++l) {
        const int lm = mod_index(l, params.M);
        cplx acc(0.0, 0.0);
        for (int i = 0; i < params.E; ++i)
            acc += std::conj(w[i]) * per_antenna[i](lm, row);
        peak = std::max(peak, std::abs(acc) * inv_e);
    }
    return peak;
}

}  // namespace

std::vector<double> scan_angles(std::span<const DDFrame> per_antenna, const AngleGrid& grid,
                                const ScanPolicy& policy, const PilotPattern& pattern,
                                const FrameParams& params, double f_d) {
    check_combine_args(per_antenna, params);
    const int n = grid.count();
    if (n < 2) throw std::invalid_argument("scan_angles: grid too small");

    std::vector<double> metric(n);
    for (int g = 0; g < n; ++g)
        metric[g] = scan_metric(per_antenna, grid.u[g], pattern, params, f_d);

    const double peak = *std::max_element(metric.begin(), metric.end());
    if (peak <= 0.0) return {};
    const double threshold = policy.threshold_ratio * peak;

    std::vector<int> maxima;
    for (int g = 0; g < n; ++g) {
        if (metric[g] < threshold) continue;
        if (g > 0 && metric[g] <= metric[g - 1]) continue;  // strictly above the left neighbor
        if (g + 1 < n && metric[g] < metric[g + 1]) continue;
        maxima.push_back(g);
    }

    // strongest first, then drop anything inside an accepted mainlobe
    std::sort(maxima.begin(), maxima.end(),
              [&](int a, int b) { return metric[a] > metric[b] || (metric[a] == metric[b] && a < b); });
    const double merge_width = policy.merge_width_factor * mainlobe_width_u(params);
    std::vector<double> accepted;
    for (int g : maxima) {
        bool close = false;
        for (double ua : accepted)
            if (std::abs(grid.u[g] - ua) < merge_width) close = true;
        if (!close) accepted.push_back(grid.u[g]);
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

std::vector<double> genie_angles(const ChannelRealization& ch) {
    std::vector<double> u;
    u.reserve(ch.paths.size());
    for (const PathSpec& path : ch.paths) u.push_back(path.u());
    return u;
}

}  // namespace otfsim
