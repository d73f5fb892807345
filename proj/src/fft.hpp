#pragma once

#include "otfsim/types.hpp"

namespace otfsim::detail {

/// In-place unnormalized DFT of length n. sign = -1 applies the
/// e^{-j2pi nk/n} kernel, sign = +1 its conjugate. Thread-safe; plans are
/// cached per (n, sign).
void fft_inplace(cplx* data, int n, int sign);

}  // namespace otfsim::detail
