#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chirpwave/config.hpp"
#include "chirpwave/dsp.hpp"

namespace chirpwave {

struct SeriesPoint {
    double x = 0.0;
    double y = 0.0;
};

struct MetricSeries {
    std::string label;
    std::string x_unit;
    std::string y_unit;
    std::vector<SeriesPoint> points;
};

struct ComplexityReport {
    WaveformKind waveform = WaveformKind::Ofdm;
    std::uint64_t multiplications = 0;
    double normalized_to_ofdm = 0.0;
};

/// 10 log10(max |x|^2 / mean |x|^2) over the given samples (pass the body,
/// not the prefix). Throws UndefinedMetricError for zero power.
double papr_db(std::span<const cd> symbol);

/// Fraction of samples strictly above each threshold. Thresholds are
/// sorted; duplicates are dropped.
MetricSeries ccdf(std::span<const double> papr_samples, std::vector<double> thresholds);

/// Smallest sample value lambda with Pr(PAPR > lambda) <= probability.
double lambda_at_ccdf(std::span<const double> papr_samples, double probability);

/// Information bits per complex sample (bits/s/Hz at one sample per 1/B).
double spectral_efficiency(const WaveformConfig& cfg);

/// Transmitter complex multiplications per symbol: L log2 L per size-L
/// transform plus one per elementwise chirp sample.
ComplexityReport modulation_complexity(const WaveformConfig& cfg);

}  // namespace chirpwave
