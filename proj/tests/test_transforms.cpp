#include <doctest.h>

#include <cmath>

#include "otfsim/transforms.hpp"

using namespace otfsim;

namespace {

FrameParams params_for(int M, int N, int cp = 0) { return make_params(M, N, 15e3, 4e9, 4, 0.45, cp); }

DDFrame random_dd(int M, int N, Rng& rng) {
    DDFrame x(M, N);
    for (cplx& z : x.data()) z = rng.cnormal(1.0);
    return x;
}

// Literal O(M^2 N^2) evaluation of the symplectic transform, kept
// independent of the FFT-based implementation.
FTFrame isfft_direct(const DDFrame& x) {
    const int M = x.rows(), N = x.cols();
    FTFrame s(M, N);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M) * N);
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < N; ++n) {
            cplx acc(0.0, 0.0);
            for (int l = 0; l < M; ++l)
                for (int k = 0; k < N; ++k) {
                    double phase = 2.0 * kPi * (static_cast<double>(n) * k / N -
                                                static_cast<double>(m) * l / M);
                    acc += x(l, k) * std::polar(1.0, phase);
                }
            s(m, n) = acc * scale;
        }
    return s;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double e = 0.0;
    for (size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}

}  // namespace

TEST_CASE("isfft matches the direct double sum, including non-power-of-two sizes") {
    Rng rng(42);
    for (auto [M, N] : {std::pair{4, 4}, {8, 4}, {5, 3}, {6, 7}, {16, 2}}) {
        DDFrame x = random_dd(M, N, rng);
        FTFrame fast = isfft(x);
        FTFrame direct = isfft_direct(x);
        CHECK(max_abs_diff(fast.data(), direct.data()) < 1e-11);
    }
}

TEST_CASE("isfft of a delta is the constant 1/sqrt(MN)") {
    DDFrame x(8, 4);
    x(0, 0) = 1.0;
    FTFrame s = isfft(x);
    const double want = 1.0 / std::sqrt(32.0);
    for (const cplx& z : s.data()) CHECK(std::abs(z - cplx(want, 0.0)) < 1e-14);
}

TEST_CASE("sfft of that constant recovers the delta") {
    FTFrame s(8, 4);
    for (cplx& z : s.data()) z = 1.0 / std::sqrt(32.0);
    DDFrame x = sfft(s);
    CHECK(std::abs(x(0, 0) - cplx(1.0, 0.0)) < 1e-14);
    double rest = 0.0;
    for (int l = 0; l < 8; ++l)
        for (int k = 0; k < 4; ++k)
            if (l || k) rest = std::max(rest, std::abs(x(l, k)));
    CHECK(rest < 1e-14);
}

TEST_CASE("sfft(isfft(x)) is the identity and energy is preserved") {
    Rng rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        DDFrame x = random_dd(64, 32, rng);
        FTFrame s = isfft(x);
        DDFrame back = sfft(s);
        CHECK(max_abs_diff(back.data(), x.data()) < 1e-12);
        CHECK(std::abs(s.energy() / x.energy() - 1.0) < 1e-12);
    }
}

TEST_CASE("sfft is linear") {
    Rng rng(11);
    FTFrame y1(16, 8), y2(16, 8);
    for (cplx& z : y1.data()) z = rng.cnormal(1.0);
    for (cplx& z : y2.data()) z = rng.cnormal(1.0);
    const cplx a(1.3, -0.2), b(-0.4, 2.1);

    FTFrame mix(16, 8);
    for (size_t i = 0; i < mix.size(); ++i) mix.data()[i] = a * y1.data()[i] + b * y2.data()[i];
    DDFrame lhs = sfft(mix);
    DDFrame r1 = sfft(y1), r2 = sfft(y2);
    for (size_t i = 0; i < lhs.size(); ++i)
        CHECK(std::abs(lhs.data()[i] - (a * r1.data()[i] + b * r2.data()[i])) < 1e-12);
}

TEST_CASE("heisenberg of a DC-only frame is the constant 1/sqrt(M)") {
    FrameParams p = params_for(16, 4);
    FTFrame s(16, 4);
    for (int n = 0; n < 4; ++n) s(0, n) = 1.0;
    TimeSignal t = heisenberg(s, p);
    for (const cplx& z : t.body()) CHECK(std::abs(z - cplx(1.0 / 4.0, 0.0)) < 1e-14);
}

TEST_CASE("wigner of a pure tone peaks at its subcarrier") {
    FrameParams p = params_for(16, 1);
    const int m0 = 5;
    TimeSignal t;
    t.cp_len = 0;
    t.samples.resize(16);
    for (int i = 0; i < 16; ++i) t.samples[i] = std::polar(1.0, 2.0 * kPi * m0 * i / 16.0);
    FTFrame y = wigner(t, p);
    CHECK(std::abs(y(m0, 0)) == doctest::Approx(std::sqrt(16.0)).epsilon(1e-12));
    for (int m = 0; m < 16; ++m)
        if (m != m0) CHECK(std::abs(y(m, 0)) < 1e-12);
}

TEST_CASE("wigner undoes heisenberg and both are unitary") {
    Rng rng(3);
    FrameParams p = params_for(64, 32, 7);
    for (int rep = 0; rep < 100; ++rep) {
        DDFrame x = random_dd(64, 32, rng);
        FTFrame s = isfft(x);
        TimeSignal t = heisenberg(s, p);
        CHECK(t.cp_len == 7);
        CHECK(static_cast<int>(t.samples.size()) == 7 + 64 * 32);
        CHECK(std::abs(t.body_energy() / s.energy() - 1.0) < 1e-12);
        FTFrame back = wigner(remove_cp(t), p);
        CHECK(max_abs_diff(back.data(), s.data()) < 1e-12);
    }
}

TEST_CASE("cyclic prefix equals the body tail and round-trips") {
    Rng rng(8);
    TimeSignal body;
    body.samples.resize(24);
    for (cplx& z : body.samples) z = rng.cnormal(1.0);

    TimeSignal with = add_cp(body, 5);
    CHECK(with.cp_len == 5);
    REQUIRE(with.samples.size() == 29);
    for (int j = 0; j < 5; ++j) CHECK(with.samples[j] == body.samples[24 - 5 + j]);

    TimeSignal back = remove_cp(with);
    CHECK(back.samples == body.samples);

    TimeSignal same = add_cp(body, 0);
    CHECK(same.samples == body.samples);

    CHECK_THROWS_AS(add_cp(body, 25), std::invalid_argument);
}

TEST_CASE("add_cp of a constant body stays constant") {
    TimeSignal body;
    body.samples.assign(12, cplx(0.3, -0.7));
    TimeSignal with = add_cp(body, 4);
    for (const cplx& z : with.samples) CHECK(z == cplx(0.3, -0.7));
}

TEST_CASE("wigner rejects signals that still carry a prefix or are mis-sized") {
    FrameParams p = params_for(8, 4);
    TimeSignal t;
    t.cp_len = 2;
    t.samples.resize(34);
    CHECK_THROWS_AS(wigner(t, p), std::invalid_argument);
    t.cp_len = 0;
    t.samples.resize(31);
    CHECK_THROWS_AS(wigner(t, p), std::invalid_argument);
}

TEST_CASE("end-to-end transform chain is the identity without a channel") {
    Rng rng(123);
    // a few (M,N) draws across the supported range, odd sizes included
    for (auto [M, N] : {std::pair{2, 2}, {3, 5}, {32, 9}, {128, 16}, {512, 2}, {60, 128}}) {
        FrameParams p = params_for(M, N, std::min(M * N, 5));
        DDFrame x = random_dd(M, N, rng);
        DDFrame back = sfft(wigner(remove_cp(add_cp(remove_cp(heisenberg(isfft(x), p)), p.cp_len)), p));
        CHECK(max_abs_diff(back.data(), x.data()) < 1e-12);
    }
}
