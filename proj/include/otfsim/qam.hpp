#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "otfsim/types.hpp"

namespace otfsim {

/// Unit-average-power Gray-mapped QAM constellation (order 4 or 16).
///
/// Order 4: labels 00,01,11,10 occupy the quadrants counterclockwise from
/// (+1+j)/sqrt(2); I sign from the LSB, Q sign from the MSB. Order 16 is
/// the product of two Gray 4-PAM axes with levels {-3,-1,+1,+3}/sqrt(10),
/// first bit pair on I, second on Q.
class Constellation {
public:
    static const Constellation& of_order(int order);  // throws for unsupported order

    int order() const { return order_; }
    int bits_per_symbol() const { return bits_; }
    const std::vector<cplx>& points() const { return points_; }
    cplx point(unsigned label) const { return points_[label]; }

    /// Minimum-Euclidean-distance decision; ties break toward the lower label.
    unsigned nearest_label(cplx y) const;

private:
    explicit Constellation(int order);
    int order_ = 0;
    int bits_ = 0;
    std::vector<cplx> points_;
};

/// Maps bits (MSB first within each symbol) to constellation symbols.
/// Throws std::invalid_argument when the bit count is not a multiple of
/// log2(order).
std::vector<cplx> qam_modulate(std::span<const std::uint8_t> bits, int order);

/// Hard-decision demapping; total function (every complex value decides).
std::vector<std::uint8_t> qam_demodulate(std::span<const cplx> symbols, int order);

}  // namespace otfsim
