#include "otfsim/pattern.hpp"

#include <cmath>
#include <stdexcept>

namespace otfsim {

const char* to_string(PatternVariant v) {
    switch (v) {
        case PatternVariant::kFullGuard: return "full_guard";
        case PatternVariant::kNaive: return "naive";
        case PatternVariant::kProposed: return "proposed";
    }
    return "?";
}

PatternVariant pattern_from_string(const std::string& s) {
    if (s == "full_guard") return PatternVariant::kFullGuard;
    if (s == "naive") return PatternVariant::kNaive;
    if (s == "proposed") return PatternVariant::kProposed;
    throw std::invalid_argument("unknown pattern variant '" + s + "'");
}

double pilot_amplitude(double snr_p_db, double sigma2) {
    return std::sqrt(sigma2 * std::pow(10.0, snr_p_db / 10.0));
}

PilotPattern make_pattern_with_amplitude(PatternVariant variant, const FrameParams& params,
                                         int l_max, int k_max, double d0_amplitude) {
    params.validate();
    const int M = params.M, N = params.N;
    if (l_max < 0 || k_max < 0)
        throw std::invalid_argument("make_pattern: l_max and k_max must be >= 0");
    if (2 * l_max > M - 1 || 4 * k_max > N - 1)
        throw std::invalid_argument("make_pattern: pattern footprint exceeds the grid");

    PilotPattern p;
    p.variant = variant;
    p.M = M;
    p.N = N;
    p.l_max = l_max;
    p.k_max = k_max;
    p.d0 = cplx(d0_amplitude, 0.0);
    // center of the legal region l0 in [l_max, M-1-l_max], k0 in [2k_max, N-1-2k_max]
    p.l0 = (M - 1) / 2;
    p.k0 = (N - 1) / 2;
    p.pilot_index = p.k0 * M + p.l0;

    int l_lo = 0, l_hi = -1, k_lo = 0, k_hi = -1;  // inclusive guard box, empty for naive
    switch (variant) {
        case PatternVariant::kFullGuard:
            l_lo = p.l0 - l_max;
            l_hi = p.l0 + l_max;
            k_lo = p.k0 - 2 * k_max;
            k_hi = p.k0 + 2 * k_max;
            break;
        case PatternVariant::kProposed:
            // round the half-width up on the +delay side so the guard count
            // is (l_max+1)(2k_max+1) for every parity
            l_lo = p.l0 - l_max / 2;
            l_hi = p.l0 + (l_max + 1) / 2;
            k_lo = p.k0 - k_max;
            k_hi = p.k0 + k_max;
            break;
        case PatternVariant::kNaive:
            break;
    }

    std::vector<std::uint8_t> role(static_cast<size_t>(M) * N, 0);  // 0=data 1=guard 2=pilot
    for (int k = k_lo; k <= k_hi; ++k)
        for (int l = l_lo; l <= l_hi; ++l) role[static_cast<size_t>(k) * M + l] = 1;
    role[p.pilot_index] = 2;

    for (size_t idx = 0; idx < role.size(); ++idx) {
        if (role[idx] == 0)
            p.data_indices.push_back(static_cast<int>(idx));
        else if (role[idx] == 1)
            p.guard_indices.push_back(static_cast<int>(idx));
    }
    return p;
}

PilotPattern make_pattern(PatternVariant variant, const FrameParams& params, int l_max,
                          int k_max, double snr_p_db, double sigma2) {
    if (sigma2 < 0.0) throw std::invalid_argument("make_pattern: sigma2 must be >= 0");
    return make_pattern_with_amplitude(variant, params, l_max, k_max,
                                       pilot_amplitude(snr_p_db, sigma2));
}

DDFrame assemble_frame(std::span<const cplx> data, const PilotPattern& pattern,
                       const FrameParams& params) {
    if (pattern.M != params.M || pattern.N != params.N)
        throw std::invalid_argument("assemble_frame: pattern/params dimensions differ");
    if (data.size() != pattern.data_indices.size())
        throw std::invalid_argument("assemble_frame: data count does not match the pattern");

    DDFrame x(params.M, params.N);  // guards stay zero
    x.data()[pattern.pilot_index] = pattern.d0;
    for (size_t i = 0; i < data.size(); ++i) x.data()[pattern.data_indices[i]] = data[i];
    return x;
}

std::vector<cplx> extract_data(const DDFrame& frame, const PilotPattern& pattern) {
    if (frame.rows() != pattern.M || frame.cols() != pattern.N)
        throw std::invalid_argument("extract_data: frame/pattern dimensions differ");

    std::vector<cplx> out;
    out.reserve(pattern.data_indices.size());
    for (int idx : pattern.data_indices) out.push_back(frame.data()[idx]);
    return out;
}

std::string pattern_grid_csv(const PilotPattern& pattern) {
    std::vector<char> role(static_cast<size_t>(pattern.M) * pattern.N, 'D');
    for (int idx : pattern.guard_indices) role[idx] = 'G';
    role[pattern.pilot_index] = 'P';

    std::string out;
    out.reserve(role.size() * 2 + pattern.M);
    for (int l = 0; l < pattern.M; ++l) {
        for (int k = 0; k < pattern.N; ++k) {
            if (k) out.push_back(',');
            out.push_back(role[static_cast<size_t>(k) * pattern.M + l]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace otfsim
