#include "chirpwave/simulations.hpp"

#include <algorithm>
#include <cmath>

#include "chirpwave/errors.hpp"
#include "chirpwave/metrics.hpp"

namespace chirpwave {

namespace {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double max_near(const std::vector<double>& mag, std::size_t rows, std::size_t cols, std::size_t row,
                std::size_t radius) {
    double best = 0.0;
    for (std::size_t o = 0; o <= 2 * radius; ++o) {
        const std::size_t r = (row + rows + o - radius) % rows;
        for (std::size_t c = 0; c < cols; ++c) {
            best = std::max(best, mag[r * cols + c]);
        }
    }
    return best;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return mix64(mix64(seed) ^ trial); }

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> papr_samples(const WaveformConfig& cfg, std::size_t symbols, std::uint64_t seed,
                                 unsigned workers) {
    cfg.validate();
    std::vector<double> out(symbols);
    const std::size_t bits = bits_per_symbol(cfg);
    parallel_for(symbols, workers, [&](std::size_t i) {
        std::mt19937_64 rng(trial_seed(seed, i));
        const CVector sym = modulate_symbol(random_bits(bits, rng), cfg);
        out[i] = papr_db(std::span<const cd>(sym).subspan(cfg.L_CP));
    });
    return out;
}

std::vector<PathTap> equal_power_taps(std::size_t paths, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::vector<PathTap> taps(paths);
    const double amp = 1.0 / std::sqrt(static_cast<double>(paths));
    for (std::size_t l = 0; l < paths; ++l) {
        taps[l].delay = l;
        taps[l].gain = std::polar(amp, phase(rng));
    }
    return taps;
}

std::vector<ErrorCount> ber_sweep(const BerSetup& setup) {
    WaveformConfig cfg = setup.cfg;
    cfg.K = 1;
    cfg.validate();
    if (setup.paths == 0 || setup.paths - 1 > cfg.L_CP) {
        throw ConfigError("paths: need 1 <= L <= L_CP + 1");
    }
    if (setup.detector == Detector::Lmmse && cfg.waveform == WaveformKind::DftSOfdmCm) {
        throw ConfigError("detector: dft_s_ofdm_cm needs joint ML detection");
    }
    const std::size_t points = setup.snr_db.size();
    const std::size_t chunk = 256;
    const std::size_t chunks = (setup.frames + chunk - 1) / chunk;
    std::vector<std::vector<ErrorCount>> partial(chunks, std::vector<ErrorCount>(points));
    const Constellation alphabet(cfg.constellation, cfg.Q);
    const std::size_t bits_per_frame = bits_per_symbol(cfg);

    parallel_for(chunks, setup.workers, [&](std::size_t c) {
        const std::size_t end = std::min(setup.frames, (c + 1) * chunk);
        for (std::size_t f = c * chunk; f < end; ++f) {
            std::mt19937_64 rng(trial_seed(setup.seed, f));
            ChannelProfile profile;
            profile.taps = equal_power_taps(setup.paths, rng);
            profile.reference_power = 1.0;
            const Bits bits = random_bits(bits_per_frame, rng);
            const BasebandFrame frame = modulate_frame(bits, cfg);
            const std::uint64_t noise_seed = rng();

            std::optional<CmMlDetector> cm;
            std::optional<MlDetector> ml;
            EquivalentChannel eq;
            if (cfg.waveform == WaveformKind::DftSOfdmCm) {
                cm.emplace(cfg, profile.taps);
            } else {
                eq = build_equivalent_channel(cfg, profile.taps, ChirpSpec{});
                if (setup.detector == Detector::Ml) {
                    ml.emplace(eq, alphabet);
                }
            }
            for (std::size_t s = 0; s < points; ++s) {
                profile.snr_db = setup.snr_db[s];
                const BasebandFrame rx = propagate(frame, profile, noise_seed);
                const auto y = rx.body(0);
                Bits decided;
                if (cm) {
                    decided = cm->detect(y);
                } else if (ml) {
                    decided = ml->bits_of(ml->search(y).index);
                } else {
                    eq.noise_var = std::pow(10.0, -setup.snr_db[s] / 10.0);
                    decided = lmmse_detect(y, eq, cfg);
                }
                partial[c][s] += count_errors(bits, decided);
            }
        }
    });

    std::vector<ErrorCount> total(points);
    for (const auto& p : partial) {
        for (std::size_t s = 0; s < points; ++s) {
            total[s] += p[s];
        }
    }
    return total;
}

std::optional<double> diversity_order(const std::vector<double>& snr_db, const std::vector<double>& ber) {
    // SNR (dB) where the curve crosses `level`, interpolating log10 BER linearly
    auto crossing = [&](double level) -> std::optional<double> {
        for (std::size_t i = 0; i + 1 < ber.size(); ++i) {
            if (ber[i] >= level && ber[i + 1] < level && ber[i + 1] > 0.0) {
                const double a = std::log10(ber[i]);
                const double b = std::log10(ber[i + 1]);
                const double t = (a - std::log10(level)) / (a - b);
                return snr_db[i] + t * (snr_db[i + 1] - snr_db[i]);
            }
        }
        return std::nullopt;
    };
    const auto s2 = crossing(1e-2);
    const auto s4 = crossing(1e-4);
    if (s2 && s4 && *s4 > *s2) {
        return 2.0 / ((*s4 - *s2) / 10.0);
    }
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < ber.size(); ++i) {
        if (ber[i] > 0.0 && ber[i] <= 1e-2) {
            usable.push_back(i);
        }
    }
    if (usable.size() < 2) {
        return std::nullopt;
    }
    const std::size_t i = usable[usable.size() - 2];
    const std::size_t j = usable.back();
    return (std::log10(ber[i]) - std::log10(ber[j])) / ((snr_db[j] - snr_db[i]) / 10.0);
}

double doppler_for_bins(double bins, const WaveformConfig& cfg) {
    return bins * cfg.bandwidth_hz / (static_cast<double>(cfg.samples_per_symbol()) * static_cast<double>(cfg.K));
}

namespace {

WaveformConfig sensing_config(const SensingSetup& setup) {
    WaveformConfig cfg = setup.cfg;
    if (setup.chain == SensingChain::Mix) {
        cfg.K = 1;
    }
    cfg.validate();
    if (setup.target_delay > cfg.L_CP) {
        throw ConfigError("target_delay: exceeds L_CP=" + std::to_string(cfg.L_CP));
    }
    return cfg;
}

SensingEcho make_echo(const SensingSetup& setup, const WaveformConfig& cfg, std::size_t trial) {
    std::mt19937_64 rng(trial_seed(setup.seed, trial));
    BasebandFrame tx = random_frame(cfg, rng);
    ChannelProfile profile;
    profile.taps = {PathTap{setup.target_delay, cd{1.0, 0.0},
                            doppler_for_bins(static_cast<double>(setup.velocity_bin), cfg)}};
    profile.snr_db = setup.snr_db;
    profile.clipping_ratio_db = setup.clipping_ratio_db;
    profile.reference_power = 1.0;
    if (setup.isr_db) {
        profile.interferers.push_back(Interferer{random_frame(cfg, rng), *setup.isr_db, setup.interferer_delay});
    }
    BasebandFrame rx = propagate(tx, profile, rng());
    return SensingEcho{std::move(tx), std::move(rx)};
}

}  // namespace

SensingEcho sensing_echo(const SensingSetup& setup, std::size_t trial) {
    return make_echo(setup, sensing_config(setup), trial);
}

std::vector<SensingTrial> sensing_trials(const SensingSetup& setup) {
    const WaveformConfig cfg = sensing_config(setup);
    std::vector<SensingTrial> out(setup.trials);
    parallel_for(setup.trials, setup.workers, [&](std::size_t t) {
        const SensingEcho echo = make_echo(setup, cfg, t);
        SensingTrial& trial = out[t];
        std::vector<double> mag;
        const std::size_t rows = cfg.N;
        std::size_t cols = 1;
        if (setup.chain == SensingChain::Mix) {
            const RangeProfile prof = mix_and_range(echo.tx.body(0), echo.rx.body(0), cfg);
            const DetectionReport rep = detect(prof, setup.target_delay);
            trial.pmsr_db = rep.pmsr_db;
            trial.detected = rep.detected;
            mag = prof.magnitudes;
        } else {
            const RangeVelocityMap map = matched_filter_map(echo.tx, echo.rx);
            const DetectionReport rep = detect(map, TargetBins{setup.target_delay, setup.velocity_bin % cfg.K});
            trial.pmsr_db = rep.pmsr_db;
            trial.detected = rep.detected;
            cols = map.velocity_bins;
            mag = map.magnitudes;
        }
        if (setup.isr_db) {
            const double target = max_near(mag, rows, cols, setup.target_delay, 1);
            const double ghost = max_near(mag, rows, cols, setup.interferer_delay, 1);
            trial.ghost = ghost * ghost >= 0.5 * target * target;
        }
    });
    return out;
}

SensingSummary summarize(const std::vector<SensingTrial>& trials) {
    SensingSummary s;
    if (trials.empty()) {
        return s;
    }
    for (const auto& t : trials) {
        s.mean_pmsr_db += t.pmsr_db;
        s.detection_rate += t.detected ? 1.0 : 0.0;
        s.ghost_rate += t.ghost ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(trials.size());
    s.mean_pmsr_db /= n;
    s.detection_rate /= n;
    s.ghost_rate /= n;
    return s;
}

}  // namespace chirpwave
