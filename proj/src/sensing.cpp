#include "chirpwave/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chirpwave/errors.hpp"

namespace chirpwave {

namespace {

std::size_t cyclic_distance(std::size_t a, std::size_t b, std::size_t len) {
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, len - d);
}

struct Grid {
    const std::vector<double>& mag;
    std::size_t rows;
    std::size_t cols;
};

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double grid_pmsr(const Grid& g, std::size_t radius) {
    const std::size_t peak = argmax(g.mag);
    const double peak_power = g.mag[peak] * g.mag[peak];
    if (!(peak_power > 0.0)) {
        throw UndefinedMetricError("pmsr: map is all zero");
    }
    const std::size_t pr = peak / g.cols;
    const std::size_t pc = peak % g.cols;
    double side = 0.0;
    for (std::size_t r = 0; r < g.rows; ++r) {
        const bool near_r = cyclic_distance(r, pr, g.rows) <= radius;
        for (std::size_t c = 0; c < g.cols; ++c) {
            if (near_r && cyclic_distance(c, pc, g.cols) <= radius) {
                continue;
            }
            const double m = g.mag[r * g.cols + c];
            side = std::max(side, m * m);
        }
    }
    if (side <= 0.0) {
        return kInfinity;
    }
    return 10.0 * std::log10(peak_power / side);
}

}  // namespace

std::vector<double> RangeVelocityMap::range_cut(std::size_t v) const {
    std::vector<double> cut(range_bins);
    for (std::size_t r = 0; r < range_bins; ++r) {
        cut[r] = at(r, v);
    }
    return cut;
}

double RangeVelocityMap::velocity_of(std::size_t v) const {
    const auto signed_bin = v >= (velocity_bins + 1) / 2 && velocity_bins > 1
                                ? static_cast<double>(v) - static_cast<double>(velocity_bins)
                                : static_cast<double>(v);
    return signed_bin * bin_to_mps;
}

RangeProfile mix_and_range(std::span<const cd> tx, std::span<const cd> rx, const WaveformConfig& cfg) {
    if (tx.size() != cfg.N || rx.size() != cfg.N) {
        throw DimensionError("mix_and_range: tx and rx bodies must have N=" + std::to_string(cfg.N) +
                             " samples (got " + std::to_string(tx.size()) + " and " + std::to_string(rx.size()) + ")");
    }
    CVector mixed = multiply_conj(rx, tx);
    dft_inplace(mixed, true);
    RangeProfile out;
    out.bin_to_meters = kSpeedOfLight / (2.0 * cfg.bandwidth_hz);
    out.magnitudes.resize(cfg.N);
    for (std::size_t b = 0; b < cfg.N; ++b) {
        out.magnitudes[b] = std::abs(mixed[b]);
    }
    return out;
}

RangeVelocityMap matched_filter_map(const BasebandFrame& tx, const BasebandFrame& rx) {
    const WaveformConfig& cfg = tx.config();
    if (rx.config().N != cfg.N || rx.config().L_CP != cfg.L_CP || rx.symbol_count() != tx.symbol_count()) {
        throw DimensionError("matched_filter_map: tx and rx grids differ");
    }
    const std::size_t n_len = cfg.N;
    const std::size_t k_len = tx.symbol_count();
    std::vector<CVector> corr(k_len);
    for (std::size_t k = 0; k < k_len; ++k) {
        corr[k] = circular_correlate(rx.body(k), tx.body(k));
    }
    const Resolutions res = resolutions(cfg);
    RangeVelocityMap map;
    map.range_bins = n_len;
    map.velocity_bins = k_len;
    map.bin_to_meters = res.range_m;
    map.bin_to_mps = res.velocity_mps;
    map.magnitudes.resize(n_len * k_len);
    CVector slow(k_len);
    for (std::size_t r = 0; r < n_len; ++r) {
        for (std::size_t k = 0; k < k_len; ++k) {
            slow[k] = corr[k][r];
        }
        dft_inplace(slow);
        for (std::size_t v = 0; v < k_len; ++v) {
            map.magnitudes[r * k_len + v] = std::abs(slow[v]);
        }
    }
    return map;
}

double pmsr(const RangeProfile& profile, std::size_t exclusion_radius_bins) {
    return grid_pmsr(Grid{profile.magnitudes, profile.size(), 1}, exclusion_radius_bins);
}

double pmsr(const RangeVelocityMap& map, std::size_t exclusion_radius_bins) {
    return grid_pmsr(Grid{map.magnitudes, map.range_bins, map.velocity_bins}, exclusion_radius_bins);
}

DetectionReport detect(const RangeProfile& profile, std::size_t truth_bin, std::size_t tolerance_bins) {
    DetectionReport rep;
    rep.range_bin = argmax(profile.magnitudes);
    rep.range_m = static_cast<double>(rep.range_bin) * profile.bin_to_meters;
    rep.pmsr_db = pmsr(profile);
    rep.detected = cyclic_distance(rep.range_bin, truth_bin % profile.size(), profile.size()) <= tolerance_bins;
    return rep;
}

DetectionReport detect(const RangeVelocityMap& map, const TargetBins& truth, std::size_t tolerance_bins) {
    const std::size_t peak = argmax(map.magnitudes);
    DetectionReport rep;
    rep.range_bin = peak / map.velocity_bins;
    rep.velocity_bin = peak % map.velocity_bins;
    rep.range_m = static_cast<double>(rep.range_bin) * map.bin_to_meters;
    rep.velocity_mps = map.velocity_of(*rep.velocity_bin);
    rep.pmsr_db = pmsr(map);
    bool hit = cyclic_distance(rep.range_bin, truth.range_bin % map.range_bins, map.range_bins) <= tolerance_bins;
    if (truth.velocity_bin) {
        hit = hit && cyclic_distance(*rep.velocity_bin, *truth.velocity_bin % map.velocity_bins, map.velocity_bins) <=
                         tolerance_bins;
    }
    rep.detected = hit;
    return rep;
}

Resolutions resolutions(const WaveformConfig& cfg) {
    if (!(cfg.bandwidth_hz > 0.0)) {
        throw ConfigError("bandwidth_hz: must be positive");
    }
    if (!(cfg.carrier_hz > 0.0)) {
        throw ConfigError("carrier_hz: must be positive");
    }
    if (cfg.N == 0 || cfg.K == 0) {
        throw ConfigError(cfg.N == 0 ? "N: must be positive" : "K: must be positive");
    }
    const double slow_time = static_cast<double>(cfg.N + cfg.L_CP) * static_cast<double>(cfg.K);
    return Resolutions{kSpeedOfLight / (2.0 * cfg.bandwidth_hz),
                       cfg.bandwidth_hz * kSpeedOfLight / (2.0 * cfg.carrier_hz * slow_time)};
}

}  // namespace chirpwave
