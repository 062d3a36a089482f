#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chirpwave/waveforms.hpp"

namespace chirpwave {

/// One propagation path: integer sample delay, complex gain, Doppler shift.
struct PathTap {
    std::size_t delay = 0;
    cd gain{1.0, 0.0};
    double doppler_hz = 0.0;
};

/// A co-channel emitter whose frame is added to the received signal.
struct Interferer {
    BasebandFrame frame;
    double isr_db = 0.0;
    /// Cyclic start offset in samples relative to the receive window. When
    /// unset a uniform offset over the whole burst is drawn from the seed.
    std::optional<std::size_t> offset;
};

struct ChannelProfile {
    std::vector<PathTap> taps{PathTap{}};
    double snr_db = kInfinity;
    std::vector<Interferer> interferers;
    /// Transmit PA clipping ratio (amplitude limit over RMS, dB). Infinity
    /// disables clipping.
    double clipping_ratio_db = kInfinity;
    /// Signal power that SNR and ISR are referenced to. Unset: the measured
    /// power of the noiseless multipath output. Set it to a nominal value
    /// when the realised power should not move the noise floor (fading
    /// averages, PA clipping losses).
    std::optional<double> reference_power;
};

/// Amplitude limiter: samples above A = sqrt(mean power) * 10^(cr/20) are
/// scaled down to A with their phase kept. Infinite cr is the identity.
BasebandFrame clip(const BasebandFrame& frame, double clipping_ratio_db);
void clip_inplace(std::span<cd> samples, double clipping_ratio_db);

/// Multipath, Doppler, interference and complex Gaussian noise over the
/// serialized burst:
///   y[n] = sum_l g_l exp(j 2 pi f_l n / B) x[n - d_l] + sum_i a_i i[n - o_i] + w[n]
/// Deterministic for a given seed.
BasebandFrame propagate(const BasebandFrame& frame, const ChannelProfile& profile, std::uint64_t seed);

/// Monostatic point target as a path tap: delay round(2 R B / c), Doppler
/// 2 v f_c / c. Throws ConfigError when the delay exceeds L_CP.
PathTap radar_echo(double range_m, double velocity_mps, cd rcs_gain, const WaveformConfig& cfg);

}  // namespace chirpwave
