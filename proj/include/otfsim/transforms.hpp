#pragma once

#include "otfsim/frame.hpp"

namespace otfsim {

/// ISFFT, delay-Doppler -> frequency-time:
///   s[m,n] = (1/sqrt(MN)) sum_{l,k} x[l,k] e^{j2pi(nk/N - ml/M)}
/// Unitary.
FTFrame isfft(const DDFrame& x);

/// SFFT, frequency-time -> delay-Doppler (exact inverse of isfft):
///   y[l,k] = (1/sqrt(MN)) sum_{m,n} s[m,n] e^{-j2pi(nk/N - ml/M)}
DDFrame sfft(const FTFrame& s);

/// Multicarrier synthesis with a rectangular pulse of duration T, sampled
/// at M*delta_f: body[n*M+i] = (1/sqrt(M)) sum_m s[m,n] e^{j2pi m i/M},
/// with a cyclic prefix of params.cp_len samples (copy of the body tail)
/// prepended. Unitary on the body.
TimeSignal heisenberg(const FTFrame& s, const FrameParams& params);

/// Matched filter to the rectangular pulse:
///   y[m,n] = (1/sqrt(M)) sum_i r[n*M+i] e^{-j2pi m i/M}
/// Expects the prefix already removed (cp_len == 0, body length M*N);
/// throws std::invalid_argument otherwise.
FTFrame wigner(const TimeSignal& r, const FrameParams& params);

/// Prepends the last cp_len body samples. Throws when cp_len exceeds the
/// body length or the input still carries a prefix.
TimeSignal add_cp(const TimeSignal& body, int cp_len);

/// Drops the prefix.
TimeSignal remove_cp(const TimeSignal& sig);

}  // namespace otfsim
