#include "chirpwave/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "chirpwave/errors.hpp"

namespace chirpwave {

namespace {

std::uint64_t transform_cost(std::size_t len) { return static_cast<std::uint64_t>(len) * log2_exact(len); }

}  // namespace

double papr_db(std::span<const cd> symbol) {
    if (symbol.empty()) {
        throw UndefinedMetricError("papr_db: empty input");
    }
    const double mean = mean_power(symbol);
    if (!(mean > 0.0)) {
        throw UndefinedMetricError("papr_db: zero-power input");
    }
    return 10.0 * std::log10(peak_power(symbol) / mean);
}

MetricSeries ccdf(std::span<const double> papr_samples, std::vector<double> thresholds) {
    if (papr_samples.empty()) {
        throw UndefinedMetricError("ccdf: no samples");
    }
    std::vector<double> sorted(papr_samples.begin(), papr_samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    MetricSeries out;
    out.label = "ccdf";
    out.x_unit = "dB";
    out.y_unit = "probability";
    const double total = static_cast<double>(sorted.size());
    for (double lambda : thresholds) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), lambda);
        out.points.push_back({lambda, static_cast<double>(above) / total});
    }
    return out;
}

double lambda_at_ccdf(std::span<const double> papr_samples, double probability) {
    if (papr_samples.empty()) {
        throw UndefinedMetricError("lambda_at_ccdf: no samples");
    }
    std::vector<double> desc(papr_samples.begin(), papr_samples.end());
    std::sort(desc.begin(), desc.end(), std::greater<>());
    // at most floor(p n) samples may lie strictly above the answer
    const auto allowed = static_cast<std::size_t>(std::floor(probability * static_cast<double>(desc.size())));
    return desc[std::min(allowed, desc.size() - 1)];
}

double spectral_efficiency(const WaveformConfig& cfg) {
    const double q_bits = std::log2(static_cast<double>(cfg.Q));
    const double n = static_cast<double>(cfg.N);
    const double m = static_cast<double>(cfg.M);
    switch (cfg.waveform) {
        case WaveformKind::DftSOfdm:
        case WaveformKind::ChirpedDftSOfdm:
            return m * q_bits / n;
        case WaveformKind::DftSOfdmCm:
            return (m * q_bits + std::log2(static_cast<double>(cfg.P))) / n;
        case WaveformKind::Ofdm:
        case WaveformKind::Afdm:
        case WaveformKind::Otfs:
            return q_bits;
        case WaveformKind::Fmcw:
            return 0.0;
    }
    return 0.0;
}

ComplexityReport modulation_complexity(const WaveformConfig& cfg) {
    const std::uint64_t n = cfg.N;
    const std::uint64_t ofdm = transform_cost(cfg.N);
    std::uint64_t count = 0;
    switch (cfg.waveform) {
        case WaveformKind::Ofdm:
            count = ofdm;
            break;
        case WaveformKind::DftSOfdm:
            count = transform_cost(cfg.M) + ofdm;
            break;
        case WaveformKind::ChirpedDftSOfdm:
        case WaveformKind::DftSOfdmCm:
            count = transform_cost(cfg.M) + ofdm + n;
            break;
        case WaveformKind::Afdm:
            count = ofdm + 2 * n;
            break;
        case WaveformKind::Otfs:
            count = ofdm + n * log2_exact(cfg.M_otfs);
            break;
        case WaveformKind::Fmcw:
            // one chirp product per sample, no transforms
            count = n;
            break;
    }
    return ComplexityReport{cfg.waveform, count, static_cast<double>(count) / static_cast<double>(ofdm)};
}

}  // namespace chirpwave
