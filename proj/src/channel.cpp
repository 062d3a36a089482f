#include "chirpwave/channel.hpp"

#include <cmath>
#include <random>
#include <string>

#include "chirpwave/errors.hpp"

namespace chirpwave {

void clip_inplace(std::span<cd> samples, double clipping_ratio_db) {
    if (std::isinf(clipping_ratio_db) && clipping_ratio_db > 0) {
        return;
    }
    const double limit = std::sqrt(mean_power(samples)) * std::pow(10.0, clipping_ratio_db / 20.0);
    for (auto& x : samples) {
        const double mag = std::abs(x);
        if (mag > limit) {
            x *= limit / mag;
        }
    }
}

BasebandFrame clip(const BasebandFrame& frame, double clipping_ratio_db) {
    BasebandFrame out = frame;
    clip_inplace(out.samples(), clipping_ratio_db);
    return out;
}

BasebandFrame propagate(const BasebandFrame& frame, const ChannelProfile& profile, std::uint64_t seed) {
    const WaveformConfig& cfg = frame.config();
    if (profile.taps.empty()) {
        throw ConfigError("taps: at least one path is required");
    }
    for (const auto& tap : profile.taps) {
        if (tap.delay > cfg.L_CP) {
            throw ConfigError("taps: delay " + std::to_string(tap.delay) + " exceeds L_CP=" + std::to_string(cfg.L_CP));
        }
    }

    const BasebandFrame tx = clip(frame, profile.clipping_ratio_db);
    const auto x = tx.samples();
    const std::size_t len = x.size();
    const double ts = cfg.sample_period_s();

    BasebandFrame rx(cfg);
    rx.payload_bits = frame.payload_bits;
    auto y = rx.samples();
    for (const auto& tap : profile.taps) {
        const double step = 2.0 * kPi * tap.doppler_hz * ts;
        for (std::size_t n = tap.delay; n < len; ++n) {
            y[n] += tap.gain * std::polar(1.0, step * static_cast<double>(n)) * x[n - tap.delay];
        }
    }

    const double signal_power = profile.reference_power.value_or(mean_power(y));
    std::mt19937_64 rng(seed);

    for (const auto& intf : profile.interferers) {
        if (!std::isfinite(intf.isr_db)) {
            throw ConfigError("interferers: isr_db must be finite");
        }
        const auto src = intf.frame.samples();
        if (src.size() != len) {
            throw DimensionError("interferer burst length " + std::to_string(src.size()) + " != " + std::to_string(len));
        }
        const std::size_t offset =
            intf.offset.value_or(std::uniform_int_distribution<std::size_t>(0, len - 1)(rng)) % len;
        const double p_int = mean_power(src);
        if (p_int <= 0.0) {
            continue;
        }
        const double scale = std::sqrt(std::pow(10.0, intf.isr_db / 10.0) * signal_power / p_int);
        for (std::size_t n = 0; n < len; ++n) {
            y[n] += scale * src[(n + len - offset) % len];
        }
    }

    if (std::isfinite(profile.snr_db)) {
        const double noise_var = signal_power / std::pow(10.0, profile.snr_db / 10.0);
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise_var / 2.0));
        for (auto& v : y) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v += cd(re, im);
        }
    }
    return rx;
}

PathTap radar_echo(double range_m, double velocity_mps, cd rcs_gain, const WaveformConfig& cfg) {
    if (!std::isfinite(range_m) || range_m < 0.0) {
        throw ConfigError("range_m: must be finite and non-negative");
    }
    const double delay = std::round(2.0 * range_m * cfg.bandwidth_hz / kSpeedOfLight);
    if (delay > static_cast<double>(cfg.L_CP)) {
        throw ConfigError("range_m: round-trip delay of " + std::to_string(static_cast<long long>(delay)) +
                          " samples exceeds the unambiguous window L_CP=" + std::to_string(cfg.L_CP));
    }
    PathTap tap;
    tap.delay = static_cast<std::size_t>(delay);
    tap.gain = rcs_gain;
    tap.doppler_hz = 2.0 * velocity_mps * cfg.carrier_hz / kSpeedOfLight;
    return tap;
}

}  // namespace chirpwave
