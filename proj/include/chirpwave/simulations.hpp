#pragma once

// Monte Carlo drivers shared by the CLI experiments and the test suites.
//
// Every trial draws from its own generator seeded with trial_seed(seed, i)
// and writes into its own result slot, so results do not depend on the
// number of workers.

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "chirpwave/channel.hpp"
#include "chirpwave/comm_rx.hpp"
#include "chirpwave/sensing.hpp"

namespace chirpwave {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// 0 means one worker per hardware thread.
unsigned resolve_workers(unsigned requested);

/// Calls body(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any call is rethrown here.
template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& body) {
    workers = std::max(1u, std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) {
        pool.emplace_back(run);
    }
    run();
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

/// Body PAPR of `symbols` independent random slow-time symbols.
std::vector<double> papr_samples(const WaveformConfig& cfg, std::size_t symbols, std::uint64_t seed,
                                 unsigned workers = 0);

/// L taps at delays 0..L-1 with gain exp(j theta) / sqrt(L), theta uniform.
std::vector<PathTap> equal_power_taps(std::size_t paths, std::mt19937_64& rng);

enum class Detector { Ml, Lmmse };

struct BerSetup {
    WaveformConfig cfg;
    std::vector<double> snr_db;
    std::size_t frames = 1000;
    std::size_t paths = 3;
    Detector detector = Detector::Ml;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

/// Bit errors per SNR point. Each frame draws one channel, one payload and
/// one noise realization, reused (rescaled) at every SNR point. Noise power
/// is referenced to unit transmit power, so SNR is the average received SNR.
std::vector<ErrorCount> ber_sweep(const BerSetup& setup);

/// Diversity order (decades of BER per 10 dB) between the SNRs where the
/// curve crosses 1e-2 and 1e-4, found by log-linear interpolation. If the
/// curve never reaches 1e-4 the last two nonzero points below 1e-2 are used.
/// nullopt when fewer than two usable points exist.
std::optional<double> diversity_order(const std::vector<double>& snr_db, const std::vector<double>& ber);

enum class SensingChain { Mix, MatchedFilter };

struct SensingSetup {
    WaveformConfig cfg;
    SensingChain chain = SensingChain::MatchedFilter;
    double snr_db = kInfinity;
    /// No interferer when unset. The interferer is an independent emitter of
    /// the same waveform arriving `interferer_delay` samples late.
    std::optional<double> isr_db;
    std::size_t interferer_delay = 20;
    std::size_t target_delay = 10;
    std::size_t velocity_bin = 0;
    double clipping_ratio_db = kInfinity;
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

struct SensingTrial {
    double pmsr_db = 0.0;
    bool detected = false;
    /// Interferer response within 3 dB of (or above) the target response.
    bool ghost = false;
};

struct SensingEcho {
    BasebandFrame tx;
    BasebandFrame rx;
};

/// Transmit burst and received echo of one trial. The mixing chain only
/// uses slow-time symbol 0, so K is forced to 1 for it.
SensingEcho sensing_echo(const SensingSetup& setup, std::size_t trial);

std::vector<SensingTrial> sensing_trials(const SensingSetup& setup);

struct SensingSummary {
    double mean_pmsr_db = 0.0;
    double detection_rate = 0.0;
    double ghost_rate = 0.0;
};

SensingSummary summarize(const std::vector<SensingTrial>& trials);

/// Doppler shift that moves a target by exactly `bins` slow-time bins.
double doppler_for_bins(double bins, const WaveformConfig& cfg);

}  // namespace chirpwave
