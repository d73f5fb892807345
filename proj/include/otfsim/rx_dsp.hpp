#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "otfsim/beamforming.hpp"
#include "otfsim/frame.hpp"
#include "otfsim/pattern.hpp"

namespace otfsim {

/// Receiver-side state for one identified path.
struct BranchEstimate {
    double u = 0.0;  // cos of the beam angle
    int k_hat = 0;   // Doppler index estimate
    int l_hat = 0;   // delay index estimate
    cplx beta_hat;   // complex gain estimate
};

/// k_hat = floor(N*T*f_d*u + 0.5). Throws std::domain_error for |u| > 1.
int estimate_doppler(double u, const FrameParams& params, double f_d);

/// argmax over l in [l0, l0+l_max] of |y[l, k0+k_hat]| minus l0; indices
/// wrap modularly; ties break toward the smaller l.
int estimate_delay(const DDFrame& branch, int k_hat, const PilotPattern& pattern);

/// beta_hat = (1/d0) y[l0+l_hat, k0+k_hat] e^{j2pi l_hat k_hat/(MN)}.
cplx estimate_gain(const DDFrame& branch, int l_hat, int k_hat,
                   const PilotPattern& pattern, const FrameParams& params);

/// Cyclic shift compensating the branch's delay/Doppler rotation:
///   out[l,k] = in[[l+l_hat]_M, [k+k_hat]_N].
DDFrame compensate(const DDFrame& branch, int l_hat, int k_hat);

/// Maximal-ratio combining of compensated branches:
///   x_hat = sum_b beta_b^* e^{j2pi l_b k_b/(MN)} y_b / sum_b |beta_b|^2.
/// Throws std::invalid_argument with no branches, std::domain_error when
/// all gains are zero.
DDFrame mrc_combine(std::span<const DDFrame> compensated,
                    std::span<const BranchEstimate> estimates, const FrameParams& params);

enum class EqualizerMode { kZf, kMmse };

/// Small-scale exact equalizer against the dense DD matrix.
/// ZF solves H x = y by column-pivoted QR (throws std::runtime_error when
/// H is rank-deficient); MMSE computes (H^H H + sigma2 I)^{-1} H^H y.
DDFrame matrix_equalize(const DDFrame& y, const Eigen::MatrixXcd& H, double sigma2,
                        EqualizerMode mode);

/// Full per-branch receiver: combine at each given direction, estimate
/// (k_hat, l_hat, beta_hat), compensate, and MRC.
struct ReceiverOutput {
    DDFrame x_hat;
    std::vector<BranchEstimate> estimates;
};

ReceiverOutput branch_receiver(std::span<const DDFrame> per_antenna,
                               std::span<const double> branch_u, const PilotPattern& pattern,
                               const FrameParams& params, double f_d);

}  // namespace otfsim
