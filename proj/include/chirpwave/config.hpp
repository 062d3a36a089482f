#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace chirpwave {

enum class WaveformKind {
    DftSOfdm,
    ChirpedDftSOfdm,
    DftSOfdmCm,
    Ofdm,
    Afdm,
    Otfs,
    Fmcw,
};

enum class ConstellationKind { Psk, Qam };

/// Only linear sweeps are implemented; the enum reserves room for others.
enum class ChirpShape { Linear };

std::string_view to_string(WaveformKind kind);
std::string_view to_string(ConstellationKind kind);
std::optional<WaveformKind> parse_waveform_kind(std::string_view text);
std::optional<ConstellationKind> parse_constellation_kind(std::string_view text);

/// True for the three DFT-spread variants (plain, chirped, chirp-modulated).
bool is_dft_spread(WaveformKind kind);
bool is_chirped(WaveformKind kind);

/// Frame parameters shared by every waveform family.
///
/// Field names follow the usual notation: N subcarriers / samples per
/// symbol, M DFT-spread size, Q constellation order, P chirp-modulation
/// order (1 = unmodulated chirp), L_CP prefix length, K slow-time symbols.
struct WaveformConfig {
    std::size_t N = 256;
    std::size_t M = 128;
    std::size_t Q = 4;
    std::size_t P = 1;
    std::size_t L_CP = 32;
    std::size_t K = 64;
    double bandwidth_hz = 50e6;
    double carrier_hz = 250e9;
    ConstellationKind constellation = ConstellationKind::Qam;
    WaveformKind waveform = WaveformKind::ChirpedDftSOfdm;
    std::size_t M_otfs = 128;
    std::size_t N_otfs = 2;
    ChirpShape chirp_shape = ChirpShape::Linear;
    /// AFDM frequency-domain (pre-IFFT) chirp rate. The time-domain chirp is
    /// fixed at 1/(2N), a full-band sweep.
    double afdm_c2 = 0.0;

    std::size_t samples_per_symbol() const { return N + L_CP; }
    std::size_t samples_per_frame() const { return K * (N + L_CP); }
    double sample_period_s() const { return 1.0 / bandwidth_hz; }

    /// Throws ConfigError naming the first violated field.
    void validate() const;

    /// Scenario I: N=256, M=128, 4-QAM, L_CP=32, K=64, B=50 MHz.
    static WaveformConfig scenario_one();
    /// Scenario II (BER): N=16, M=4, QPSK, L_CP=4, K=1.
    static WaveformConfig scenario_two();
};

/// Constellation bits per slow-time symbol plus, for DFT-s-OFDM-CM, the
/// chirp-index bits. FMCW carries none.
std::size_t bits_per_symbol(const WaveformConfig& cfg);
std::size_t data_symbols_per_symbol(const WaveformConfig& cfg);
std::size_t chirp_bits_per_symbol(const WaveformConfig& cfg);

}  // namespace chirpwave
