#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "otfsim/pattern.hpp"
#include "otfsim/qam.hpp"

using namespace otfsim;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

FrameParams desk_params(int M, int N) { return make_params(M, N, 15e3, 4e9, 16, 0.45, 4); }

}  // namespace

TEST_CASE("frame params invariants") {
    FrameParams p = desk_params(64, 32);
    CHECK(p.T() * p.delta_f == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.lambda() == doctest::Approx(299792458.0 / 4e9).epsilon(1e-15));
    CHECK(p.eta == doctest::Approx(0.45 * p.lambda()).epsilon(1e-15));
    CHECK_THROWS_AS(make_params(0, 32, 15e3, 4e9, 16, 0.45, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_params(64, 32, -1.0, 4e9, 16, 0.45, 4), std::invalid_argument);
    CHECK_THROWS_AS(make_params(64, 32, 15e3, 4e9, 0, 0.45, 4), std::invalid_argument);
}

TEST_CASE("4-QAM Gray map fixes bits 00 to the first quadrant") {
    auto syms = qam_modulate(std::vector<std::uint8_t>{0, 0}, 4);
    REQUIRE(syms.size() == 1);
    CHECK(std::abs(syms[0] - cplx(kInvSqrt2, kInvSqrt2)) < 1e-15);

    // counterclockwise quadrant order 00,01,11,10
    auto quad = [](cplx z) {
        if (z.real() > 0 && z.imag() > 0) return 1;
        if (z.real() < 0 && z.imag() > 0) return 2;
        if (z.real() < 0 && z.imag() < 0) return 3;
        return 4;
    };
    const Constellation& c = Constellation::of_order(4);
    CHECK(quad(c.point(0b00)) == 1);
    CHECK(quad(c.point(0b01)) == 2);
    CHECK(quad(c.point(0b11)) == 3);
    CHECK(quad(c.point(0b10)) == 4);
}

TEST_CASE("constellations have unit average power and Gray adjacency") {
    for (int order : {4, 16}) {
        const Constellation& c = Constellation::of_order(order);
        double power = 0.0;
        for (const cplx& z : c.points()) power += std::norm(z);
        CHECK(std::abs(power / order - 1.0) < 1e-12);

        // nearest geometric neighbors differ in exactly one bit
        for (unsigned a = 0; a < c.points().size(); ++a) {
            double dmin = 1e30;
            for (unsigned b = 0; b < c.points().size(); ++b)
                if (b != a) dmin = std::min(dmin, std::abs(c.point(a) - c.point(b)));
            for (unsigned b = 0; b < c.points().size(); ++b) {
                if (b == a || std::abs(c.point(a) - c.point(b)) > dmin * 1.0001) continue;
                CHECK(std::popcount(a ^ b) == 1);
            }
        }
    }
}

TEST_CASE("mean power of the four 4-QAM symbols is one") {
    auto syms = qam_modulate(std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1, 1, 0}, 4);
    double p = 0.0;
    for (const cplx& z : syms) p += std::norm(z);
    CHECK(p / 4.0 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("demodulate inverts modulate for every 16-QAM label") {
    std::vector<std::uint8_t> bits;
    for (unsigned label = 0; label < 16; ++label)
        for (int b = 3; b >= 0; --b) bits.push_back((label >> b) & 1u);
    auto syms = qam_modulate(bits, 16);
    auto back = qam_demodulate(syms, 16);
    CHECK(back == bits);
}

TEST_CASE("demodulation ties break toward the lowest label") {
    auto bits = qam_demodulate(std::vector<cplx>{cplx(0.0, 0.0)}, 4);
    CHECK(bits == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("modulate/demodulate round trip on random bits") {
    Rng rng(99);
    for (int order : {4, 16}) {
        const int bps = Constellation::of_order(order).bits_per_symbol();
        std::vector<std::uint8_t> bits(bps * 257);
        for (auto& b : bits) b = rng.next_u64() & 1u;
        CHECK(qam_demodulate(qam_modulate(bits, order), order) == bits);
    }
}

TEST_CASE("modulate rejects ragged bit counts") {
    CHECK_THROWS_AS(qam_modulate(std::vector<std::uint8_t>{1, 0, 1}, 4), std::invalid_argument);
    CHECK_THROWS_AS(qam_modulate(std::vector<std::uint8_t>{1, 0, 1}, 16), std::invalid_argument);
    CHECK_THROWS_AS(qam_modulate(std::vector<std::uint8_t>{1, 0}, 8), std::invalid_argument);
}

TEST_CASE("naive pattern on a 4x4 grid: one pilot, no guards, 15 data cells") {
    FrameParams p = desk_params(4, 4);
    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kNaive, p, 0, 0, 1.0);
    CHECK(pat.guard_indices.empty());
    CHECK(pat.data_count() == 15);
    CHECK(pat.overhead_count() == 1);
}

TEST_CASE("full-guard pattern data count at full scale") {
    FrameParams p = desk_params(512, 128);
    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kFullGuard, p, 20, 16, 1.0);
    CHECK(pat.overhead_count() == 2665);
    CHECK(pat.data_count() == 65536 - 2665);
}

TEST_CASE("proposed pattern data count at full scale") {
    FrameParams p = desk_params(512, 128);
    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kProposed, p, 20, 16, 1.0);
    CHECK(pat.data_count() == 64843);

    DDFrame zero(512, 128);
    auto data = extract_data(zero, pat);
    CHECK(data.size() == 64843);
    for (const cplx& z : data) CHECK(z == cplx(0.0, 0.0));
}

TEST_CASE("assemble/extract round trip for every variant") {
    Rng rng(5);
    FrameParams p = desk_params(32, 24);
    for (PatternVariant v :
         {PatternVariant::kFullGuard, PatternVariant::kNaive, PatternVariant::kProposed}) {
        PilotPattern pat = make_pattern_with_amplitude(v, p, 3, 2, 2.5);
        std::vector<cplx> data(pat.data_indices.size());
        for (cplx& z : data) z = rng.cnormal(1.0);

        DDFrame x = assemble_frame(data, pat, p);
        CHECK(x.data()[pat.pilot_index] == pat.d0);
        for (int g : pat.guard_indices) CHECK(x.data()[g] == cplx(0.0, 0.0));

        auto back = extract_data(x, pat);
        REQUIRE(back.size() == data.size());
        for (size_t i = 0; i < data.size(); ++i) CHECK(back[i] == data[i]);
    }
}

TEST_CASE("data fill order is l-fastest") {
    FrameParams p = desk_params(8, 8);
    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kNaive, p, 0, 0, 1.0);
    std::vector<cplx> data(pat.data_indices.size());
    for (size_t i = 0; i < data.size(); ++i) data[i] = cplx(static_cast<double>(i), 0.0);
    DDFrame x = assemble_frame(data, pat, p);
    // first data cell is (l=0,k=0), second (l=1,k=0): l varies fastest
    CHECK(x(0, 0) == cplx(0.0, 0.0));
    CHECK(x(1, 0) == cplx(1.0, 0.0));
    CHECK(x(2, 0) == cplx(2.0, 0.0));
}

TEST_CASE("assemble rejects mismatched data counts") {
    FrameParams p = desk_params(16, 16);
    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kProposed, p, 2, 1, 1.0);
    std::vector<cplx> data(pat.data_indices.size() - 1);
    CHECK_THROWS_AS(assemble_frame(data, pat, p), std::invalid_argument);
}

TEST_CASE("pattern footprints that do not fit are rejected") {
    FrameParams p = desk_params(16, 16);
    CHECK_THROWS_AS(make_pattern_with_amplitude(PatternVariant::kFullGuard, p, 8, 1, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_pattern_with_amplitude(PatternVariant::kFullGuard, p, 2, 4, 1.0),
                    std::invalid_argument);
}

TEST_CASE("pilot amplitude follows the pilot-SNR definition") {
    CHECK(pilot_amplitude(40.0, 0.01) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(pilot_amplitude(20.0, 1.0) == doctest::Approx(10.0).epsilon(1e-12));
    FrameParams p = desk_params(64, 32);
    PilotPattern pat = make_pattern(PatternVariant::kProposed, p, 3, 2, 40.0, 0.01);
    CHECK(std::abs(pat.d0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(pat.d0.imag() == 0.0);
}

TEST_CASE("pattern grid dump marks roles") {
    FrameParams p = desk_params(8, 8);
    PilotPattern pat = make_pattern_with_amplitude(PatternVariant::kProposed, p, 2, 1, 1.0);
    std::string csv = pattern_grid_csv(pat);
    CHECK(std::count(csv.begin(), csv.end(), 'P') == 1);
    CHECK(std::count(csv.begin(), csv.end(), 'G') == pat.overhead_count() - 1);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
}
