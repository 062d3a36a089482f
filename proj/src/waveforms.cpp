#include "chirpwave/waveforms.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "chirpwave/constellation.hpp"
#include "chirpwave/errors.hpp"

namespace chirpwave {

namespace {

// exp(j 2 pi num / den) with the fraction reduced exactly in integers first
cd unit_phasor(std::uint64_t num, std::uint64_t den) {
    const double frac = static_cast<double>(num % den) / static_cast<double>(den);
    return std::polar(1.0, 2.0 * kPi * frac);
}

void require_length(std::span<const cd> v, std::size_t expected, const char* what) {
    if (v.size() != expected) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(expected) + " samples, got " +
                             std::to_string(v.size()));
    }
}

void require_bits(std::size_t got, std::size_t expected, const char* what) {
    if (got != expected) {
        throw PayloadError(std::string(what) + ": expected " + std::to_string(expected) + " bits, got " +
                           std::to_string(got));
    }
}

// Body (no prefix) of an interleaved DFT-s-OFDM symbol.
CVector dft_s_ofdm_body(std::span<const cd> symbols, const WaveformConfig& cfg) {
    require_length(symbols, cfg.M, "modulate_dft_s_ofdm");
    const CVector spread = dft(symbols);
    CVector grid(cfg.N, cd{});
    const std::size_t spacing = cfg.N / cfg.M;
    for (std::size_t m = 0; m < cfg.M; ++m) {
        grid[m * spacing] = spread[m];
    }
    dft_inplace(grid, true);
    const double scale = std::sqrt(static_cast<double>(spacing));
    for (auto& x : grid) {
        x *= scale;
    }
    return grid;
}

CVector dft_s_ofdm_symbols(std::span<const cd> body, const WaveformConfig& cfg) {
    CVector grid = dft(body);
    const std::size_t spacing = cfg.N / cfg.M;
    CVector spread(cfg.M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(spacing));
    for (std::size_t m = 0; m < cfg.M; ++m) {
        spread[m] = grid[m * spacing] * scale;
    }
    dft_inplace(spread, true);
    return spread;
}

CVector afdm_pre_chirp(const WaveformConfig& cfg) {
    CVector c(cfg.N);
    for (std::size_t m = 0; m < cfg.N; ++m) {
        const double md = static_cast<double>(m);
        c[m] = std::polar(1.0, 2.0 * kPi * cfg.afdm_c2 * md * md);
    }
    return c;
}

// c1 = 1/(2N): the same full-band sweep as make_chirp at p = 0
CVector afdm_post_chirp(const WaveformConfig& cfg) { return make_chirp(ChirpSpec{}, cfg); }

CVector ofdm_body(std::span<const cd> symbols, const WaveformConfig& cfg) {
    require_length(symbols, cfg.N, "ofdm");
    return dft(symbols, true);
}

CVector afdm_body(std::span<const cd> symbols, const WaveformConfig& cfg) {
    require_length(symbols, cfg.N, "afdm");
    CVector pre = multiply(symbols, afdm_pre_chirp(cfg));
    dft_inplace(pre, true);
    return multiply(pre, afdm_post_chirp(cfg));
}

// Delay-Doppler grid index: delay l, Doppler k -> l * N_otfs + k.
CVector otfs_body(std::span<const cd> symbols, const WaveformConfig& cfg) {
    const std::size_t md = cfg.M_otfs;
    const std::size_t nd = cfg.N_otfs;
    require_length(symbols, md * nd, "otfs");
    // ISFFT: M-point DFT along delay, N-point inverse DFT along Doppler.
    std::vector<CVector> tf(nd, CVector(md));  // tf[n][m]
    CVector col(md);
    for (std::size_t k = 0; k < nd; ++k) {
        for (std::size_t l = 0; l < md; ++l) {
            col[l] = symbols[l * nd + k];
        }
        dft_inplace(col);
        for (std::size_t m = 0; m < md; ++m) {
            tf[k][m] = col[m];  // holds the delay-transformed column for Doppler k
        }
    }
    std::vector<CVector> grid(nd, CVector(md));
    CVector row(nd);
    for (std::size_t m = 0; m < md; ++m) {
        for (std::size_t k = 0; k < nd; ++k) {
            row[k] = tf[k][m];
        }
        dft_inplace(row, true);
        for (std::size_t n = 0; n < nd; ++n) {
            grid[n][m] = row[n];
        }
    }
    // Heisenberg transform: per time slot, M-point inverse DFT, serialized.
    CVector body(md * nd);
    for (std::size_t n = 0; n < nd; ++n) {
        dft_inplace(grid[n], true);
        for (std::size_t t = 0; t < md; ++t) {
            body[n * md + t] = grid[n][t];
        }
    }
    return body;
}

CVector otfs_symbols(std::span<const cd> body, const WaveformConfig& cfg) {
    const std::size_t md = cfg.M_otfs;
    const std::size_t nd = cfg.N_otfs;
    std::vector<CVector> grid(nd, CVector(md));
    for (std::size_t n = 0; n < nd; ++n) {
        for (std::size_t t = 0; t < md; ++t) {
            grid[n][t] = body[n * md + t];
        }
        dft_inplace(grid[n]);
    }
    std::vector<CVector> tf(nd, CVector(md));
    CVector row(nd);
    for (std::size_t m = 0; m < md; ++m) {
        for (std::size_t n = 0; n < nd; ++n) {
            row[n] = grid[n][m];
        }
        dft_inplace(row);
        for (std::size_t k = 0; k < nd; ++k) {
            tf[k][m] = row[k];
        }
    }
    CVector symbols(md * nd);
    for (std::size_t k = 0; k < nd; ++k) {
        dft_inplace(tf[k], true);
        for (std::size_t l = 0; l < md; ++l) {
            symbols[l * nd + k] = tf[k][l];
        }
    }
    return symbols;
}

Constellation constellation_for(const WaveformConfig& cfg) { return Constellation(cfg.constellation, cfg.Q); }

}  // namespace

void ChirpSpec::validate(const WaveformConfig& cfg) const {
    if (start_index >= cfg.P) {
        throw ConfigError("chirp start index " + std::to_string(start_index) + " out of range [0, P=" +
                          std::to_string(cfg.P) + ")");
    }
}

BasebandFrame::BasebandFrame(const WaveformConfig& cfg) : cfg_(cfg), samples_(cfg.samples_per_frame()) {}

std::span<cd> BasebandFrame::symbol(std::size_t k) {
    return std::span<cd>(samples_).subspan(k * cfg_.samples_per_symbol(), cfg_.samples_per_symbol());
}

std::span<const cd> BasebandFrame::symbol(std::size_t k) const {
    return std::span<const cd>(samples_).subspan(k * cfg_.samples_per_symbol(), cfg_.samples_per_symbol());
}

std::span<const cd> BasebandFrame::body(std::size_t k) const { return symbol(k).subspan(cfg_.L_CP, cfg_.N); }

CVector make_chirp(const ChirpSpec& spec, const WaveformConfig& cfg) {
    spec.validate(cfg);
    const std::uint64_t n_len = cfg.N;
    const std::uint64_t offset_den = static_cast<std::uint64_t>(cfg.P) * cfg.M;
    CVector c(cfg.N);
    for (std::uint64_t n = 0; n < n_len; ++n) {
        // the two phase terms are reduced separately to keep them exact
        c[n] = unit_phasor(n * n, 2 * n_len) * unit_phasor(spec.start_index * n, offset_den);
    }
    return c;
}

CVector add_prefix(std::span<const cd> body, std::size_t cp_len) {
    CVector out;
    out.reserve(body.size() + cp_len);
    out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(cp_len), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

CVector modulate_dft_s_ofdm(std::span<const cd> symbols, const WaveformConfig& cfg) {
    return add_prefix(dft_s_ofdm_body(symbols, cfg), cfg.L_CP);
}

std::size_t chirp_index_from_bits(std::span<const std::uint8_t> bits) {
    return gray_decode(bits_to_label(bits));
}

Bits chirp_bits_from_index(std::size_t p, std::size_t order) {
    Bits out;
    append_label_bits(gray_encode(static_cast<std::uint32_t>(p)), log2_exact(order), out);
    return out;
}

CVector modulate_with_chirp(std::span<const cd> symbols, std::span<const std::uint8_t> chirp_bits,
                            const WaveformConfig& cfg) {
    ChirpSpec spec;
    if (cfg.waveform == WaveformKind::ChirpedDftSOfdm) {
        require_bits(chirp_bits.size(), 0, "modulate_with_chirp (unmodulated chirp)");
    } else if (cfg.waveform == WaveformKind::DftSOfdmCm) {
        require_bits(chirp_bits.size(), log2_exact(cfg.P), "modulate_with_chirp (chirp index)");
        spec.start_index = chirp_index_from_bits(chirp_bits);
    } else {
        throw ConfigError("waveform: modulate_with_chirp needs chirped_dft_s_ofdm or dft_s_ofdm_cm");
    }
    return add_prefix(multiply(dft_s_ofdm_body(symbols, cfg), make_chirp(spec, cfg)), cfg.L_CP);
}

CVector modulate_baseline(std::span<const std::uint8_t> bits, const WaveformConfig& cfg) {
    if (cfg.waveform == WaveformKind::Fmcw) {
        require_bits(bits.size(), 0, "fmcw");
        return add_prefix(make_chirp(ChirpSpec{}, cfg), cfg.L_CP);
    }
    require_bits(bits.size(), bits_per_symbol(cfg), to_string(cfg.waveform).data());
    const CVector symbols = constellation_for(cfg).map(bits);
    switch (cfg.waveform) {
        case WaveformKind::Ofdm:
            return add_prefix(ofdm_body(symbols, cfg), cfg.L_CP);
        case WaveformKind::Afdm:
            return add_prefix(afdm_body(symbols, cfg), cfg.L_CP);
        case WaveformKind::Otfs:
            return add_prefix(otfs_body(symbols, cfg), cfg.L_CP);
        default:
            throw ConfigError("waveform: modulate_baseline handles ofdm, afdm, otfs and fmcw only");
    }
}

CVector modulate_symbol(std::span<const std::uint8_t> bits, const WaveformConfig& cfg) {
    if (!is_dft_spread(cfg.waveform)) {
        return modulate_baseline(bits, cfg);
    }
    require_bits(bits.size(), bits_per_symbol(cfg), to_string(cfg.waveform).data());
    const std::size_t chirp_bits = chirp_bits_per_symbol(cfg);
    const CVector symbols = constellation_for(cfg).map(bits.subspan(chirp_bits));
    if (cfg.waveform == WaveformKind::DftSOfdm) {
        return modulate_dft_s_ofdm(symbols, cfg);
    }
    return modulate_with_chirp(symbols, bits.first(chirp_bits), cfg);
}

CVector modulate_from_symbols(std::span<const cd> symbols, const WaveformConfig& cfg, std::size_t chirp_index) {
    switch (cfg.waveform) {
        case WaveformKind::DftSOfdm:
            return modulate_dft_s_ofdm(symbols, cfg);
        case WaveformKind::ChirpedDftSOfdm:
        case WaveformKind::DftSOfdmCm: {
            const std::size_t p = cfg.waveform == WaveformKind::DftSOfdmCm ? chirp_index : 0;
            const CVector chirp = make_chirp(ChirpSpec{ChirpShape::Linear, p}, cfg);
            return add_prefix(multiply(dft_s_ofdm_body(symbols, cfg), chirp), cfg.L_CP);
        }
        case WaveformKind::Ofdm:
            return add_prefix(ofdm_body(symbols, cfg), cfg.L_CP);
        case WaveformKind::Afdm:
            return add_prefix(afdm_body(symbols, cfg), cfg.L_CP);
        case WaveformKind::Otfs:
            return add_prefix(otfs_body(symbols, cfg), cfg.L_CP);
        case WaveformKind::Fmcw:
            require_length(symbols, 0, "fmcw");
            return add_prefix(make_chirp(ChirpSpec{}, cfg), cfg.L_CP);
    }
    return {};
}

BasebandFrame modulate_frame(std::span<const std::uint8_t> bits, const WaveformConfig& cfg) {
    cfg.validate();
    const std::size_t per_symbol = bits_per_symbol(cfg);
    require_bits(bits.size(), per_symbol * cfg.K, "modulate_frame");
    BasebandFrame frame(cfg);
    for (std::size_t k = 0; k < cfg.K; ++k) {
        const CVector sym = modulate_symbol(bits.subspan(k * per_symbol, per_symbol), cfg);
        std::copy(sym.begin(), sym.end(), frame.symbol(k).begin());
    }
    frame.payload_bits.assign(bits.begin(), bits.end());
    return frame;
}

Bits random_bits(std::size_t count, std::mt19937_64& rng) {
    Bits bits(count);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i % 64 == 0) {
            word = rng();
        }
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return bits;
}

BasebandFrame random_frame(const WaveformConfig& cfg, std::mt19937_64& rng) {
    const Bits bits = random_bits(bits_per_symbol(cfg) * cfg.K, rng);
    return modulate_frame(bits, cfg);
}

Bits demodulate_symbol(std::span<const cd> body, const WaveformConfig& cfg) {
    require_length(body, cfg.N, "demodulate_symbol");
    const Constellation alphabet = constellation_for(cfg);
    switch (cfg.waveform) {
        case WaveformKind::Fmcw:
            return {};
        case WaveformKind::Ofdm:
            return alphabet.demap(dft(body));
        case WaveformKind::Afdm: {
            CVector v = multiply_conj(body, afdm_post_chirp(cfg));
            dft_inplace(v);
            return alphabet.demap(multiply_conj(v, afdm_pre_chirp(cfg)));
        }
        case WaveformKind::Otfs:
            return alphabet.demap(otfs_symbols(body, cfg));
        case WaveformKind::DftSOfdm:
            return alphabet.demap(dft_s_ofdm_symbols(body, cfg));
        case WaveformKind::ChirpedDftSOfdm: {
            const CVector dechirped = multiply_conj(body, make_chirp(ChirpSpec{}, cfg));
            return alphabet.demap(dft_s_ofdm_symbols(dechirped, cfg));
        }
        case WaveformKind::DftSOfdmCm: {
            // try every start index, keep the one whose re-modulation fits best
            double best_residual = std::numeric_limits<double>::infinity();
            Bits best;
            for (std::size_t p = 0; p < cfg.P; ++p) {
                const CVector chirp = make_chirp(ChirpSpec{ChirpShape::Linear, p}, cfg);
                const CVector dechirped = multiply_conj(body, chirp);
                Bits data = alphabet.demap(dft_s_ofdm_symbols(dechirped, cfg));
                const CVector rebuilt = multiply(dft_s_ofdm_body(alphabet.map(data), cfg), chirp);
                double residual = 0.0;
                for (std::size_t n = 0; n < cfg.N; ++n) {
                    residual += std::norm(body[n] - rebuilt[n]);
                }
                if (residual < best_residual) {
                    best_residual = residual;
                    best = chirp_bits_from_index(p, cfg.P);
                    best.insert(best.end(), data.begin(), data.end());
                }
            }
            return best;
        }
    }
    return {};
}

Bits demodulate_frame(const BasebandFrame& frame) {
    Bits out;
    for (std::size_t k = 0; k < frame.symbol_count(); ++k) {
        const Bits b = demodulate_symbol(frame.body(k), frame.config());
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

}  // namespace chirpwave
