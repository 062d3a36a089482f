#pragma once

// Radar processing: conjugate mixing for beat-frequency ranging, matched
// filtering into range-velocity maps, PMSR and a simple argmax detector.

#include <cstddef>
#include <optional>
#include <vector>

#include "chirpwave/waveforms.hpp"

namespace chirpwave {

/// |spectrum| of the mixer output, one bin per range cell.
struct RangeProfile {
    std::vector<double> magnitudes;
    double bin_to_meters = 0.0;

    std::size_t size() const { return magnitudes.size(); }
};

/// Magnitudes over N range bins x K velocity bins, stored range-major.
struct RangeVelocityMap {
    std::size_t range_bins = 0;
    std::size_t velocity_bins = 0;
    std::vector<double> magnitudes;
    double bin_to_meters = 0.0;
    double bin_to_mps = 0.0;

    double at(std::size_t r, std::size_t v) const { return magnitudes[r * velocity_bins + v]; }
    /// Range cut at velocity bin v.
    std::vector<double> range_cut(std::size_t v) const;
    /// Velocity of bin v; bins at or above K/2 are negative velocities.
    double velocity_of(std::size_t v) const;
};

struct DetectionReport {
    std::size_t range_bin = 0;
    std::optional<std::size_t> velocity_bin;
    double range_m = 0.0;
    std::optional<double> velocity_mps;
    double pmsr_db = 0.0;
    bool detected = false;
};

struct TargetBins {
    std::size_t range_bin = 0;
    std::optional<std::size_t> velocity_bin;
};

struct Resolutions {
    double range_m = 0.0;
    double velocity_mps = 0.0;
};

/// m[n] = rx[n] conj(tx[n]); profile = |inverse DFT(m)|. The conjugate
/// product only keeps the difference frequency, so no low-pass stage is
/// needed. With the cyclic chirp a delay of d samples lands in bin d.
RangeProfile mix_and_range(std::span<const cd> tx, std::span<const cd> rx, const WaveformConfig& cfg);

/// Per slow-time symbol circular correlation of rx with tx, then a K-point
/// DFT across symbols for every range bin.
RangeVelocityMap matched_filter_map(const BasebandFrame& tx, const BasebandFrame& rx);

/// Peak power over the strongest value outside +-radius bins (cyclic, per
/// axis) around the peak, in dB. +inf when nothing lies outside or every
/// sidelobe is zero. Throws UndefinedMetricError on an all-zero input.
double pmsr(const RangeProfile& profile, std::size_t exclusion_radius_bins = 1);
double pmsr(const RangeVelocityMap& map, std::size_t exclusion_radius_bins = 1);

/// Detected iff the global argmax is within +-tolerance bins (cyclic, per
/// axis) of the truth.
DetectionReport detect(const RangeProfile& profile, std::size_t truth_bin, std::size_t tolerance_bins = 1);
DetectionReport detect(const RangeVelocityMap& map, const TargetBins& truth, std::size_t tolerance_bins = 1);

/// (c/2B, Bc / (2 f_c (N + L_CP) K)).
Resolutions resolutions(const WaveformConfig& cfg);

}  // namespace chirpwave
