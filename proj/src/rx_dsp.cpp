#include "otfsim/rx_dsp.hpp"

#include <cmath>
#include <stdexcept>

namespace otfsim {

int estimate_doppler(double u, const FrameParams& params, double f_d) {
    if (std::abs(u) > 1.0) throw std::domain_error("estimate_doppler: |u| must be <= 1");
    return static_cast<int>(std::floor(params.N * params.T() * f_d * u + 0.5));
}

int estimate_delay(const DDFrame& branch, int k_hat, const PilotPattern& pattern) {
    const int row = mod_index(pattern.k0 + k_hat, branch.cols());
    int best_l = 0;
    double best = -1.0;
    for (int d = 0; d <= pattern.l_max; ++d) {
        const double a = std::abs(branch.at_mod(pattern.l0 + d, row));
        if (a > best) {  // strict: ties keep the smaller delay
            best = a;
            best_l = d;
        }
    }
    return best_l;
}

cplx estimate_gain(const DDFrame& branch, int l_hat, int k_hat, const PilotPattern& pattern,
                   const FrameParams& params) {
    const cplx v = branch.at_mod(pattern.l0 + l_hat, pattern.k0 + k_hat);
    const double rot =
        2.0 * kPi * l_hat * k_hat / (static_cast<double>(params.M) * params.N);
    return v / pattern.d0 * std::polar(1.0, rot);
}

DDFrame compensate(const DDFrame& branch, int l_hat, int k_hat) {
    const int M = branch.rows(), N = branch.cols();
    DDFrame out(M, N);
    for (int k = 0; k < N; ++k)
        for (int l = 0; l < M; ++l) out(l, k) = branch.at_mod(l + l_hat, k + k_hat);
    return out;
}

DDFrame mrc_combine(std::span<const DDFrame> compensated,
                    std::span<const BranchEstimate> estimates, const FrameParams& params) {
    if (compensated.empty() || compensated.size() != estimates.size())
        throw std::invalid_argument("mrc_combine: need one estimate per branch");

    double den = 0.0;
    for (const BranchEstimate& e : estimates) den += std::norm(e.beta_hat);
    if (den <= 0.0) throw std::domain_error("mrc_combine: all branch gains are zero");

    DDFrame out(params.M, params.N);
    for (size_t b = 0; b < compensated.size(); ++b) {
        if (!out.same_shape(compensated[b]))
            throw std::invalid_argument("mrc_combine: branch frame shapes differ");
        const double rot = 2.0 * kPi * estimates[b].l_hat * estimates[b].k_hat /
                           (static_cast<double>(params.M) * params.N);
        const cplx w = std::conj(estimates[b].beta_hat) * std::polar(1.0, rot) / den;
        const cplx* src = compensated[b].data().data();
        cplx* dst = out.data().data();
        for (size_t idx = 0; idx < out.size(); ++idx) dst[idx] += w * src[idx];
    }
    return out;
}

DDFrame matrix_equalize(const DDFrame& y, const Eigen::MatrixXcd& H, double sigma2,
                        EqualizerMode mode) {
    const long size = static_cast<long>(y.size());
    if (H.rows() != size || H.cols() != size)
        throw std::invalid_argument("matrix_equalize: matrix does not match the frame size");

    Eigen::VectorXcd v(size);
    for (long i = 0; i < size; ++i) v(i) = y.data()[i];

    Eigen::VectorXcd x;
    if (mode == EqualizerMode::kZf) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(H);
        if (qr.rank() < size) throw std::runtime_error("matrix_equalize: channel matrix is singular");
        x = qr.solve(v);
    } else {
        Eigen::MatrixXcd a = H.adjoint() * H;
        a.diagonal().array() += sigma2;
        x = a.ldlt().solve(H.adjoint() * v);
    }

    DDFrame out(y.rows(), y.cols());
    for (long i = 0; i < size; ++i) out.data()[i] = x(i);
    return out;
}

ReceiverOutput branch_receiver(std::span<const DDFrame> per_antenna,
                               std::span<const double> branch_u, const PilotPattern& pattern,
                               const FrameParams& params, double f_d) {
    if (branch_u.empty()) throw std::invalid_argument("branch_receiver: no branches");

    ReceiverOutput out;
    std::vector<DDFrame> comps;
    comps.reserve(branch_u.size());
    for (double u : branch_u) {
        DDFrame frame = combine(per_antenna, u, params);
        BranchEstimate est;
        est.u = u;
        est.k_hat = estimate_doppler(u, params, f_d);
        est.l_hat = estimate_delay(frame, est.k_hat, pattern);
        est.beta_hat = estimate_gain(frame, est.l_hat, est.k_hat, pattern, params);
        comps.push_back(compensate(frame, est.l_hat, est.k_hat));
        out.estimates.push_back(est);
    }
    out.x_hat = mrc_combine(comps, out.estimates, params);
    return out;
}

}  // namespace otfsim
