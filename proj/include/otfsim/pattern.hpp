#pragma once

#include <span>
#include <string>
#include <vector>

#include "otfsim/frame.hpp"

namespace otfsim {

enum class PatternVariant { kFullGuard, kNaive, kProposed };

const char* to_string(PatternVariant v);
PatternVariant pattern_from_string(const std::string& s);  // throws on unknown name

/// One pilot cell at (l0,k0) plus a guard region sized by the channel
/// support (l_max, k_max); everything else carries data.
///
/// full_guard: guards fill l in [l0-l_max, l0+l_max],
///             k in [k0-2k_max, k0+2k_max]  -> (2l_max+1)(4k_max+1) cells.
/// proposed:   guards fill l in [l0-floor(l_max/2), l0+ceil(l_max/2)],
///             k in [k0-k_max, k0+k_max]    -> (l_max+1)(2k_max+1) cells.
/// naive:      no guards.
struct PilotPattern {
    PatternVariant variant = PatternVariant::kProposed;
    int M = 0, N = 0;
    int l0 = 0, k0 = 0;
    int l_max = 0, k_max = 0;
    cplx d0;  // pilot amplitude, phase 0

    int pilot_index = 0;             // linear index k0*M + l0
    std::vector<int> guard_indices;  // sorted linear indices
    std::vector<int> data_indices;   // sorted linear indices (l fastest)

    int overhead_count() const { return 1 + static_cast<int>(guard_indices.size()); }
    double overhead_percent() const {
        return 100.0 * overhead_count() / (static_cast<double>(M) * N);
    }
    int data_count() const { return static_cast<int>(data_indices.size()); }
};

/// Pilot amplitude from the pilot SNR definition |d0|^2 = sigma2 * 10^(snr_p/10).
double pilot_amplitude(double snr_p_db, double sigma2);

/// Builds a pattern with the pilot at the center of its legal region
/// (l0 in [l_max, M-1-l_max], k0 in [2k_max, N-1-2k_max]). Throws
/// std::invalid_argument when the footprint does not fit the grid.
PilotPattern make_pattern(PatternVariant variant, const FrameParams& params,
                          int l_max, int k_max, double snr_p_db, double sigma2);

/// Same, but with the pilot amplitude given directly (noiseless setups).
PilotPattern make_pattern_with_amplitude(PatternVariant variant, const FrameParams& params,
                                         int l_max, int k_max, double d0_amplitude);

/// Places d0 at the pilot cell, zeros at guards, and data at data_indices
/// in order (l fastest). Throws on a data-count mismatch.
DDFrame assemble_frame(std::span<const cplx> data, const PilotPattern& pattern,
                       const FrameParams& params);

/// Reads back the data cells in the same canonical order.
std::vector<cplx> extract_data(const DDFrame& frame, const PilotPattern& pattern);

/// Debug dump of cell roles, one CSV row per delay index, cells P/G/D.
std::string pattern_grid_csv(const PilotPattern& pattern);

}  // namespace otfsim
