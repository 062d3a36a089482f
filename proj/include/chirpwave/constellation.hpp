#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chirpwave/config.hpp"
#include "chirpwave/dsp.hpp"

namespace chirpwave {

std::uint32_t gray_encode(std::uint32_t v);
std::uint32_t gray_decode(std::uint32_t g);

/// Packs `bits` (MSB first, values 0/1) into an integer label.
std::uint32_t bits_to_label(std::span<const std::uint8_t> bits);
/// Appends `width` bits of `label` (MSB first) to `out`.
void append_label_bits(std::uint32_t label, unsigned width, Bits& out);

/// Gray-labelled PSK or square-QAM alphabet with unit average energy.
/// points()[label] is the symbol carrying the bit pattern `label`.
class Constellation {
public:
    Constellation(ConstellationKind kind, std::size_t order);

    ConstellationKind kind() const { return kind_; }
    std::size_t order() const { return points_.size(); }
    unsigned bits_per_symbol() const { return bits_; }
    const CVector& points() const { return points_; }

    cd point(std::uint32_t label) const { return points_[label]; }

    /// Label of the nearest point (ties go to the lowest label).
    std::uint32_t slice(cd symbol) const;

    CVector map(std::span<const std::uint8_t> bits) const;
    Bits demap(std::span<const cd> symbols) const;

private:
    ConstellationKind kind_;
    unsigned bits_;
    CVector points_;
};

/// map_constellation(bits, Q, kind): unit-energy Gray-labelled symbols.
CVector map_constellation(std::span<const std::uint8_t> bits, std::size_t order, ConstellationKind kind);

}  // namespace chirpwave
