#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace otfsim::detail {

namespace {

// FFTW_ESTIMATE keeps planning deterministic (FFTW_MEASURE picks plans by
// timing, which can change rounding between runs). FFTW_UNALIGNED lets one
// plan execute on any buffer.
fftw_plan plan_for(int n, int sign) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, fftw_plan> cache;

    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<cplx> buf(static_cast<size_t>(n));
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, plan);
    return plan;
}

}  // namespace

void fft_inplace(cplx* data, int n, int sign) {
    if (n <= 1) return;
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_for(n, sign), p, p);
}

}  // namespace otfsim::detail
