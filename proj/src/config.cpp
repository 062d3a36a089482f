#include "chirpwave/config.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "chirpwave/dsp.hpp"
#include "chirpwave/errors.hpp"

namespace chirpwave {

namespace {

constexpr std::array<std::pair<WaveformKind, std::string_view>, 7> kWaveformNames{{
    {WaveformKind::DftSOfdm, "dft_s_ofdm"},
    {WaveformKind::ChirpedDftSOfdm, "chirped_dft_s_ofdm"},
    {WaveformKind::DftSOfdmCm, "dft_s_ofdm_cm"},
    {WaveformKind::Ofdm, "ofdm"},
    {WaveformKind::Afdm, "afdm"},
    {WaveformKind::Otfs, "otfs"},
    {WaveformKind::Fmcw, "fmcw"},
}};

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

}  // namespace

std::string_view to_string(WaveformKind kind) {
    for (const auto& [k, name] : kWaveformNames) {
        if (k == kind) {
            return name;
        }
    }
    return "unknown";
}

std::string_view to_string(ConstellationKind kind) {
    return kind == ConstellationKind::Psk ? "psk" : "qam";
}

std::optional<WaveformKind> parse_waveform_kind(std::string_view text) {
    for (const auto& [k, name] : kWaveformNames) {
        if (name == text) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<ConstellationKind> parse_constellation_kind(std::string_view text) {
    if (text == "psk") {
        return ConstellationKind::Psk;
    }
    if (text == "qam") {
        return ConstellationKind::Qam;
    }
    return std::nullopt;
}

bool is_dft_spread(WaveformKind kind) {
    return kind == WaveformKind::DftSOfdm || kind == WaveformKind::ChirpedDftSOfdm ||
           kind == WaveformKind::DftSOfdmCm;
}

bool is_chirped(WaveformKind kind) {
    return kind == WaveformKind::ChirpedDftSOfdm || kind == WaveformKind::DftSOfdmCm;
}

void WaveformConfig::validate() const {
    require(is_power_of_two(N) && N >= 2, "N: must be a power of two >= 2 (got " + std::to_string(N) + ")");
    require(is_power_of_two(M), "M: must be a power of two (got " + std::to_string(M) + ")");
    require(M <= N, "M: must not exceed N (M divides N)");
    require(is_power_of_two(Q) && Q >= 2, "Q: must be a power of two >= 2 (got " + std::to_string(Q) + ")");
    if (constellation == ConstellationKind::Qam) {
        require(log2_exact(Q) % 2 == 0, "Q: square QAM needs an even number of bits per symbol");
    }
    require(is_power_of_two(P), "P: must be a power of two (got " + std::to_string(P) + ")");
    require(P <= N, "P: must divide N");
    require(L_CP < N, "L_CP: must be smaller than N");
    require(is_power_of_two(K), "K: must be a power of two (got " + std::to_string(K) + ")");
    require(std::isfinite(bandwidth_hz) && bandwidth_hz > 0.0, "B: must be positive");
    require(std::isfinite(carrier_hz) && carrier_hz > 0.0, "f_c: must be positive");
    require(is_power_of_two(M_otfs), "M_otfs: must be a power of two");
    require(is_power_of_two(N_otfs), "N_otfs: must be a power of two");
    require(M_otfs * N_otfs == N, "M_otfs*N_otfs: product must equal N (got " + std::to_string(M_otfs) + "*" +
                                      std::to_string(N_otfs) + " != " + std::to_string(N) + ")");
    require(std::isfinite(afdm_c2), "afdm_c2: must be finite");
}

WaveformConfig WaveformConfig::scenario_one() { return WaveformConfig{}; }

WaveformConfig WaveformConfig::scenario_two() {
    WaveformConfig cfg;
    cfg.N = 16;
    cfg.M = 4;
    cfg.Q = 4;
    cfg.P = 1;
    cfg.L_CP = 4;
    cfg.K = 1;
    cfg.constellation = ConstellationKind::Psk;
    cfg.M_otfs = 4;
    cfg.N_otfs = 4;
    return cfg;
}

std::size_t data_symbols_per_symbol(const WaveformConfig& cfg) {
    switch (cfg.waveform) {
        case WaveformKind::DftSOfdm:
        case WaveformKind::ChirpedDftSOfdm:
        case WaveformKind::DftSOfdmCm:
            return cfg.M;
        case WaveformKind::Ofdm:
        case WaveformKind::Afdm:
            return cfg.N;
        case WaveformKind::Otfs:
            return cfg.M_otfs * cfg.N_otfs;
        case WaveformKind::Fmcw:
            return 0;
    }
    return 0;
}

std::size_t chirp_bits_per_symbol(const WaveformConfig& cfg) {
    return cfg.waveform == WaveformKind::DftSOfdmCm ? log2_exact(cfg.P) : 0;
}

std::size_t bits_per_symbol(const WaveformConfig& cfg) {
    return chirp_bits_per_symbol(cfg) + data_symbols_per_symbol(cfg) * log2_exact(cfg.Q);
}

}  // namespace chirpwave
