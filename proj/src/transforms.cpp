#include "otfsim/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace otfsim {

using detail::fft_inplace;

FTFrame isfft(const DDFrame& x) {
    const int M = x.rows(), N = x.cols();
    FTFrame s(M, N);
    std::vector<cplx> buf(static_cast<size_t>(std::max(M, N)));

    // t[l,n] = sum_k x[l,k] e^{+j2pi nk/N}
    std::vector<cplx> t(static_cast<size_t>(M) * N);
    for (int l = 0; l < M; ++l) {
        for (int k = 0; k < N; ++k) buf[k] = x(l, k);
        fft_inplace(buf.data(), N, +1);
        for (int n = 0; n < N; ++n) t[static_cast<size_t>(n) * M + l] = buf[n];
    }
    // s[m,n] = (1/sqrt(MN)) sum_l t[l,n] e^{-j2pi ml/M}
    const double scale = 1.0 / std::sqrt(static_cast<double>(M) * N);
    for (int n = 0; n < N; ++n) {
        cplx* col = t.data() + static_cast<size_t>(n) * M;
        fft_inplace(col, M, -1);
        for (int m = 0; m < M; ++m) s(m, n) = col[m] * scale;
    }
    return s;
}

DDFrame sfft(const FTFrame& s) {
    const int M = s.rows(), N = s.cols();
    DDFrame y(M, N);
    std::vector<cplx> buf(static_cast<size_t>(std::max(M, N)));

    // t[m,k] = sum_n s[m,n] e^{-j2pi nk/N}
    std::vector<cplx> t(static_cast<size_t>(M) * N);
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) buf[n] = s(m, n);
        fft_inplace(buf.data(), N, -1);
        for (int k = 0; k < N; ++k) t[static_cast<size_t>(k) * M + m] = buf[k];
    }
    // y[l,k] = (1/sqrt(MN)) sum_m t[m,k] e^{+j2pi ml/M}
    const double scale = 1.0 / std::sqrt(static_cast<double>(M) * N);
    for (int k = 0; k < N; ++k) {
        cplx* col = t.data() + static_cast<size_t>(k) * M;
        fft_inplace(col, M, +1);
        for (int l = 0; l < M; ++l) y(l, k) = col[l] * scale;
    }
    return y;
}

TimeSignal heisenberg(const FTFrame& s, const FrameParams& params) {
    if (s.rows() != params.M || s.cols() != params.N)
        throw std::invalid_argument("heisenberg: frame/params dimensions differ");
    const int M = params.M, N = params.N;

    TimeSignal body;
    body.cp_len = 0;
    body.samples.resize(static_cast<size_t>(M) * N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    std::vector<cplx> buf(static_cast<size_t>(M));
    for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) buf[m] = s(m, n);
        fft_inplace(buf.data(), M, +1);
        for (int i = 0; i < M; ++i) body.samples[static_cast<size_t>(n) * M + i] = buf[i] * scale;
    }
    return add_cp(body, params.cp_len);
}

FTFrame wigner(const TimeSignal& r, const FrameParams& params) {
    if (r.cp_len != 0)
        throw std::invalid_argument("wigner: prefix must be removed first");
    if (r.body_len() != params.grid_size())
        throw std::invalid_argument("wigner: body length does not match M*N");
    const int M = params.M, N = params.N;

    FTFrame y(M, N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    std::vector<cplx> buf(static_cast<size_t>(M));
    for (int n = 0; n < N; ++n) {
        const cplx* sym = r.samples.data() + static_cast<size_t>(n) * M;
        for (int i = 0; i < M; ++i) buf[i] = sym[i];
        fft_inplace(buf.data(), M, -1);
        for (int m = 0; m < M; ++m) y(m, n) = buf[m] * scale;
    }
    return y;
}

TimeSignal add_cp(const TimeSignal& body, int cp_len) {
    if (body.cp_len != 0)
        throw std::invalid_argument("add_cp: signal already carries a prefix");
    const int n = static_cast<int>(body.samples.size());
    if (cp_len < 0 || cp_len > n)
        throw std::invalid_argument("add_cp: cp_len exceeds the body length");

    TimeSignal out;
    out.cp_len = cp_len;
    out.samples.reserve(body.samples.size() + cp_len);
    out.samples.insert(out.samples.end(), body.samples.end() - cp_len, body.samples.end());
    out.samples.insert(out.samples.end(), body.samples.begin(), body.samples.end());
    return out;
}

TimeSignal remove_cp(const TimeSignal& sig) {
    TimeSignal out;
    out.cp_len = 0;
    out.samples.assign(sig.samples.begin() + sig.cp_len, sig.samples.end());
    return out;
}

}  // namespace otfsim
