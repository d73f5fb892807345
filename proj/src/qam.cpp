#include "otfsim/qam.hpp"

#include <cmath>
#include <stdexcept>

namespace otfsim {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kInvSqrt10 = 0.31622776601683794;

// Gray 4-PAM: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (adjacent levels
// differ in one bit).
double pam4_level(unsigned two_bits) {
    switch (two_bits) {
        case 0b00: return -3.0;
        case 0b01: return -1.0;
        case 0b11: return +1.0;
        default: return +3.0;  // 0b10
    }
}

}  // namespace

Constellation::Constellation(int order) : order_(order) {
    if (order == 4) {
        bits_ = 2;
        points_.resize(4);
        for (unsigned label = 0; label < 4; ++label) {
            // quadrants counterclockwise from (+1+j)/sqrt(2): 00,01,11,10
            double re = (label & 0b01) ? -kInvSqrt2 : kInvSqrt2;
            double im = (label & 0b10) ? -kInvSqrt2 : kInvSqrt2;
            points_[label] = {re, im};
        }
    } else if (order == 16) {
        bits_ = 4;
        points_.resize(16);
        for (unsigned label = 0; label < 16; ++label) {
            double re = pam4_level((label >> 2) & 0b11) * kInvSqrt10;
            double im = pam4_level(label & 0b11) * kInvSqrt10;
            points_[label] = {re, im};
        }
    } else {
        throw std::invalid_argument("Constellation: order must be 4 or 16");
    }
}

const Constellation& Constellation::of_order(int order) {
    static const Constellation qam4(4);
    static const Constellation qam16(16);
    if (order == 4) return qam4;
    if (order == 16) return qam16;
    throw std::invalid_argument("Constellation: order must be 4 or 16");
}

unsigned Constellation::nearest_label(cplx y) const {
    unsigned best = 0;
    double best_d = std::norm(y - points_[0]);
    for (unsigned label = 1; label < points_.size(); ++label) {
        double d = std::norm(y - points_[label]);
        if (d < best_d) {  // strict: ties keep the lower label
            best_d = d;
            best = label;
        }
    }
    return best;
}

std::vector<cplx> qam_modulate(std::span<const std::uint8_t> bits, int order) {
    const Constellation& c = Constellation::of_order(order);
    const int bps = c.bits_per_symbol();
    if (bits.size() % bps != 0)
        throw std::invalid_argument("qam_modulate: bit count not divisible by bits per symbol");

    std::vector<cplx> out;
    out.reserve(bits.size() / bps);
    for (size_t i = 0; i < bits.size(); i += bps) {
        unsigned label = 0;
        for (int b = 0; b < bps; ++b) label = (label << 1) | (bits[i + b] & 1u);
        out.push_back(c.point(label));
    }
    return out;
}

std::vector<std::uint8_t> qam_demodulate(std::span<const cplx> symbols, int order) {
    const Constellation& c = Constellation::of_order(order);
    const int bps = c.bits_per_symbol();

    std::vector<std::uint8_t> out;
    out.reserve(symbols.size() * bps);
    for (const cplx& y : symbols) {
        unsigned label = c.nearest_label(y);
        for (int b = bps - 1; b >= 0; --b) out.push_back((label >> b) & 1u);
    }
    return out;
}

}  // namespace otfsim
