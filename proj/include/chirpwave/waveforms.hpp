#pragma once

// Transmit-side generation for every waveform family, plus the matching
// noiseless demodulators used to check invertibility.
//
// All DFT-spread variants use interleaved subcarrier mapping and are scaled
// so that the body's mean power equals the mean symbol power. With that
// scaling an interleaved DFT-s-OFDM body is exactly the symbol block
// repeated N/M times.

#include <cstdint>
#include <random>
#include <span>

#include "chirpwave/config.hpp"
#include "chirpwave/dsp.hpp"

namespace chirpwave {

/// Linear chirp with a selectable starting frequency.
///
/// c[n] = exp(j 2 pi (p n / (P M) + n^2 / (2N))), n = 0..N-1.
/// The quadratic term is a full-band sweep that wraps cyclically (one FFT
/// bin per sample). The P start offsets are spread uniformly across one
/// interleave-comb spacing (N/M bins). Offsets that are whole multiples of
/// the comb spacing reduce to a per-symbol phase ramp on the repeated
/// block and could not be told apart from data, so they are not used.
struct ChirpSpec {
    ChirpShape shape = ChirpShape::Linear;
    std::size_t start_index = 0;

    void validate(const WaveformConfig& cfg) const;
};

/// Frame of K slow-time symbols, each N + L_CP samples (prefix first).
class BasebandFrame {
public:
    explicit BasebandFrame(const WaveformConfig& cfg);

    const WaveformConfig& config() const { return cfg_; }
    std::size_t symbol_count() const { return cfg_.K; }

    std::span<cd> samples() { return samples_; }
    std::span<const cd> samples() const { return samples_; }
    std::span<cd> symbol(std::size_t k);
    std::span<const cd> symbol(std::size_t k) const;
    /// The N-sample body of symbol k (prefix removed).
    std::span<const cd> body(std::size_t k) const;

    Bits payload_bits;

private:
    WaveformConfig cfg_;
    CVector samples_;
};

CVector make_chirp(const ChirpSpec& spec, const WaveformConfig& cfg);

/// Prepends the last `cp_len` samples of `body`.
CVector add_prefix(std::span<const cd> body, std::size_t cp_len);

/// M symbols -> N + L_CP samples (M-point DFT, interleaved mapping, N-point
/// inverse DFT, prefix).
CVector modulate_dft_s_ofdm(std::span<const cd> symbols, const WaveformConfig& cfg);

/// Chirped DFT-s-OFDM (empty chirp_bits) or DFT-s-OFDM-CM (log2 P Gray
/// bits choosing the start index). The prefix is taken from the chirped body.
CVector modulate_with_chirp(std::span<const cd> symbols, std::span<const std::uint8_t> chirp_bits,
                            const WaveformConfig& cfg);

/// OFDM, AFDM, OTFS or FMCW symbol from its payload bits.
CVector modulate_baseline(std::span<const std::uint8_t> bits, const WaveformConfig& cfg);

/// One slow-time symbol of cfg.waveform from constellation symbols (no bit
/// mapping). For DFT-s-OFDM-CM `chirp_index` selects the start offset.
CVector modulate_from_symbols(std::span<const cd> symbols, const WaveformConfig& cfg, std::size_t chirp_index = 0);

/// One slow-time symbol of cfg.waveform from bits_per_symbol(cfg) bits.
CVector modulate_symbol(std::span<const std::uint8_t> bits, const WaveformConfig& cfg);

/// K symbols from K * bits_per_symbol(cfg) bits.
BasebandFrame modulate_frame(std::span<const std::uint8_t> bits, const WaveformConfig& cfg);

Bits random_bits(std::size_t count, std::mt19937_64& rng);
BasebandFrame random_frame(const WaveformConfig& cfg, std::mt19937_64& rng);

/// Gray mapping between chirp-index bits and the start index p.
std::size_t chirp_index_from_bits(std::span<const std::uint8_t> bits);
Bits chirp_bits_from_index(std::size_t p, std::size_t order);

/// Noiseless inverse of modulate_symbol on a prefix-free body. For
/// DFT-s-OFDM-CM the chirp index is picked by minimum re-modulation residual.
Bits demodulate_symbol(std::span<const cd> body, const WaveformConfig& cfg);
Bits demodulate_frame(const BasebandFrame& frame);

}  // namespace chirpwave
