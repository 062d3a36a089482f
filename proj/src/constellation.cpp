#include "chirpwave/constellation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "chirpwave/errors.hpp"

namespace chirpwave {

std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }

std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t v = g;
    for (std::uint32_t shift = g >> 1; shift != 0; shift >>= 1) {
        v ^= shift;
    }
    return v;
}

std::uint32_t bits_to_label(std::span<const std::uint8_t> bits) {
    std::uint32_t label = 0;
    for (auto b : bits) {
        label = (label << 1) | (b & 1u);
    }
    return label;
}

void append_label_bits(std::uint32_t label, unsigned width, Bits& out) {
    for (unsigned i = width; i-- > 0;) {
        out.push_back(static_cast<std::uint8_t>((label >> i) & 1u));
    }
}

Constellation::Constellation(ConstellationKind kind, std::size_t order) : kind_(kind) {
    if (!is_power_of_two(order) || order < 2) {
        throw ConfigError("Q: constellation order must be a power of two >= 2 (got " + std::to_string(order) + ")");
    }
    bits_ = log2_exact(order);
    points_.resize(order);
    if (kind == ConstellationKind::Psk) {
        // BPSK sits on the real axis; higher orders are rotated by pi/Q.
        if (order == 2) {
            points_[0] = {1.0, 0.0};
            points_[1] = {-1.0, 0.0};
            return;
        }
        if (order == 4) {
            // exact diagonal points so equal-energy hypotheses tie exactly
            const double a = 1.0 / std::sqrt(2.0);
            points_[0] = {a, a};
            points_[1] = {-a, a};
            points_[3] = {-a, -a};
            points_[2] = {a, -a};
            return;
        }
        const double offset = kPi / static_cast<double>(order);
        for (std::uint32_t g = 0; g < order; ++g) {
            const double phase = offset + 2.0 * kPi * static_cast<double>(g) / static_cast<double>(order);
            points_[gray_encode(g)] = std::polar(1.0, phase);
        }
        return;
    }
    if (bits_ % 2 != 0) {
        throw ConfigError("Q: square QAM needs an even number of bits per symbol (got Q=" + std::to_string(order) + ")");
    }
    const unsigned half = bits_ / 2;
    const std::uint32_t side = 1u << half;
    const double norm = std::sqrt(2.0 * (static_cast<double>(order) - 1.0) / 3.0);
    for (std::uint32_t i = 0; i < side; ++i) {
        for (std::uint32_t q = 0; q < side; ++q) {
            const double re = 2.0 * i - (side - 1.0);
            const double im = 2.0 * q - (side - 1.0);
            const std::uint32_t label = (gray_encode(i) << half) | gray_encode(q);
            points_[label] = cd(re, im) / norm;
        }
    }
}

std::uint32_t Constellation::slice(cd symbol) const {
    std::uint32_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::uint32_t label = 0; label < points_.size(); ++label) {
        const double d = std::norm(symbol - points_[label]);
        if (d < best_dist) {
            best_dist = d;
            best = label;
        }
    }
    return best;
}

CVector Constellation::map(std::span<const std::uint8_t> bits) const {
    if (bits.size() % bits_ != 0) {
        throw PayloadError("constellation: bit count " + std::to_string(bits.size()) +
                           " is not a multiple of log2(Q)=" + std::to_string(bits_));
    }
    CVector out;
    out.reserve(bits.size() / bits_);
    for (std::size_t i = 0; i < bits.size(); i += bits_) {
        out.push_back(points_[bits_to_label(bits.subspan(i, bits_))]);
    }
    return out;
}

Bits Constellation::demap(std::span<const cd> symbols) const {
    Bits out;
    out.reserve(symbols.size() * bits_);
    for (const auto& s : symbols) {
        append_label_bits(slice(s), bits_, out);
    }
    return out;
}

CVector map_constellation(std::span<const std::uint8_t> bits, std::size_t order, ConstellationKind kind) {
    return Constellation(kind, order).map(bits);
}

}  // namespace chirpwave
