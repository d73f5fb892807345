#pragma once

#include <span>
#include <vector>

#include "otfsim/types.hpp"

namespace otfsim {

/// Static geometry and physical constants of one OTFS configuration.
///
/// M delay bins x N Doppler bins on a grid with subcarrier spacing
/// delta_f and symbol duration T = 1/delta_f (T * delta_f = 1 by
/// construction). The receiver is a uniform linear array of E elements
/// spaced eta meters apart.
struct FrameParams {
    int M = 64;              // delay bins / subcarriers
    int N = 32;              // Doppler bins / symbols per frame
    double delta_f = 15e3;   // subcarrier spacing (Hz)
    double f_c = 4e9;        // carrier frequency (Hz)
    int E = 128;             // receive antennas
    double eta = 0.0;        // antenna spacing (m); 0 means "set from ratio"
    int cp_len = 0;          // cyclic-prefix length (samples)

    double T() const { return 1.0 / delta_f; }
    double lambda() const { return kSpeedOfLight / f_c; }
    double sample_rate() const { return M * delta_f; }
    int grid_size() const { return M * N; }

    /// Per-element phase slope of the array: phi_i = 2*pi*i*eta/lambda.
    double element_phase(int i) const { return 2.0 * kPi * i * eta / lambda(); }

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

/// Builds params with antenna spacing given as a fraction of the carrier
/// wavelength (the usual way array geometry is specified).
FrameParams make_params(int M, int N, double delta_f, double f_c, int E,
                        double eta_over_lambda, int cp_len);

namespace detail {

/// M x N complex grid stored with the first index fastest.
template <typename Tag>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols)
        : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return v_.size(); }

    cplx& operator()(int r, int c) { return v_[static_cast<size_t>(c) * rows_ + r]; }
    const cplx& operator()(int r, int c) const { return v_[static_cast<size_t>(c) * rows_ + r]; }

    /// Value at ((r mod rows), (c mod cols)); accepts negative indices.
    const cplx& at_mod(int r, int c) const {
        return (*this)(mod_index(r, rows_), mod_index(c, cols_));
    }

    std::vector<cplx>& data() { return v_; }
    const std::vector<cplx>& data() const { return v_; }

    bool same_shape(const Grid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    double energy() const {
        double e = 0.0;
        for (const cplx& z : v_) e += std::norm(z);
        return e;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<cplx> v_;
};

struct DDTag {};
struct FTTag {};

}  // namespace detail

/// Delay-Doppler frame x[l,k]: l in [0,M) delay, k in [0,N) Doppler.
using DDFrame = detail::Grid<detail::DDTag>;

/// Frequency-time frame s[m,n]: m in [0,M) frequency, n in [0,N) time.
using FTFrame = detail::Grid<detail::FTTag>;

/// Baseband sample sequence at rate M*delta_f, optionally carrying a
/// cyclic prefix of cp_len samples in front of the body.
struct TimeSignal {
    std::vector<cplx> samples;
    int cp_len = 0;

    int body_len() const { return static_cast<int>(samples.size()) - cp_len; }
    std::span<const cplx> body() const { return {samples.data() + cp_len, static_cast<size_t>(body_len())}; }
    std::span<cplx> body() { return {samples.data() + cp_len, static_cast<size_t>(body_len())}; }

    double body_energy() const {
        double e = 0.0;
        for (const cplx& z : body()) e += std::norm(z);
        return e;
    }
};

}  // namespace otfsim
