#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace otfsim {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline int mod_index(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

/// Deterministic random stream. The generator (mt19937_64) and the
/// variate transforms below are fully specified, so a given seed produces
/// the same sequence on every platform/compiler (std::normal_distribution
/// would not guarantee that).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (two uniforms per draw, no caching).
    double normal() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Circularly symmetric complex Gaussian CN(0, variance).
    cplx cnormal(double variance) {
        double s = std::sqrt(variance * 0.5);
        double re = s * normal();
        double im = s * normal();
        return {re, im};
    }

private:
    std::mt19937_64 gen_;
};

/// Seed for one experiment stream: a pure function of (master seed,
/// stream id, index), so trials are reproducible independent of execution
/// order.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index);

}  // namespace otfsim
