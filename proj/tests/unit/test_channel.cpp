#include <doctest.h>

#include <random>

#include "chirpwave/channel.hpp"
#include "chirpwave/constellation.hpp"
#include "chirpwave/errors.hpp"
#include "chirpwave/metrics.hpp"
#include "support/oracles.hpp"

using namespace chirpwave;

namespace {

WaveformConfig test_config(WaveformKind kind = WaveformKind::ChirpedDftSOfdm) {
    WaveformConfig cfg;
    cfg.N = 64;
    cfg.M = 16;
    cfg.L_CP = 8;
    cfg.K = 8;
    cfg.M_otfs = 16;
    cfg.N_otfs = 4;
    cfg.waveform = kind;
    return cfg;
}

BasebandFrame frame_from(const CVector& samples, const WaveformConfig& cfg) {
    BasebandFrame f(cfg);
    std::copy(samples.begin(), samples.end(), f.samples().begin());
    return f;
}

double power_db(double p) { return 10.0 * std::log10(p); }

}  // namespace

TEST_CASE("clipping") {
    std::mt19937_64 rng(1);
    SUBCASE("infinite ratio is the identity") {
        const BasebandFrame f = random_frame(test_config(WaveformKind::Ofdm), rng);
        const BasebandFrame c = clip(f, kInfinity);
        CHECK(std::equal(c.samples().begin(), c.samples().end(), f.samples().begin()));
    }
    SUBCASE("constant-modulus frames are untouched at any ratio >= 0 dB") {
        WaveformConfig cfg = test_config();
        cfg.constellation = ConstellationKind::Psk;
        const BasebandFrame f = random_frame(cfg, rng);
        for (double cr : {0.0, 1.0, 6.0}) {
            const BasebandFrame c = clip(f, cr);
            CHECK(oracle::max_abs_diff(CVector(c.samples().begin(), c.samples().end()),
                                       CVector(f.samples().begin(), f.samples().end())) < 1e-12);
        }
    }
    SUBCASE("16-QAM DFT-s-OFDM at 0 dB: every sample above the RMS level is cut to it") {
        WaveformConfig cfg = test_config(WaveformKind::DftSOfdm);
        cfg.Q = 16;
        cfg.K = 1;
        cfg.M = 16;
        // one copy of every 16-QAM point: unit mean power, corner points present
        const Constellation alphabet(ConstellationKind::Qam, 16);
        const CVector x = modulate_dft_s_ofdm(alphabet.points(), cfg);
        CHECK(papr_db(CVector(x.begin() + 8, x.end())) == doctest::Approx(10.0 * std::log10(1.8)));
        const BasebandFrame c = clip(frame_from(x, cfg), 0.0);
        const double rms2 = mean_power(x);
        // peak over the pre-clip mean is 0 dB; the clipped signal's own PAPR is not,
        // since inner points stay below the limit and pull the mean down
        CHECK(power_db(peak_power(c.samples()) / rms2) == doctest::Approx(0.0).epsilon(1e-12));
        for (std::size_t n = 0; n < x.size(); ++n) {
            if (std::norm(x[n]) > rms2) {
                CHECK(std::norm(c.samples()[n]) == doctest::Approx(rms2));
            } else {
                CHECK(c.samples()[n] == x[n]);
            }
        }
        CHECK(papr_db(c.body(0)) > 0.0);
    }
    SUBCASE("never raises the peak, never alters the phase") {
        const BasebandFrame f = random_frame(test_config(WaveformKind::Ofdm), rng);
        for (double cr : {-3.0, 0.0, 3.0}) {
            const BasebandFrame c = clip(f, cr);
            CHECK(peak_power(c.samples()) <= peak_power(f.samples()));
            for (std::size_t n = 0; n < f.samples().size(); ++n) {
                if (std::abs(f.samples()[n]) > 0) {
                    CHECK(std::abs(std::arg(c.samples()[n] * std::conj(f.samples()[n]))) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("propagation") {
    std::mt19937_64 rng(2);
    const WaveformConfig cfg = test_config();
    const BasebandFrame x = random_frame(cfg, rng);

    SUBCASE("identity channel") {
        const BasebandFrame y = propagate(x, ChannelProfile{}, 1);
        CHECK(std::equal(y.samples().begin(), y.samples().end(), x.samples().begin()));
    }
    SUBCASE("a delayed tap cyclically shifts every body") {
        for (std::size_t d : {1u, 3u, 8u}) {
            ChannelProfile p;
            p.taps = {PathTap{d}};
            const BasebandFrame y = propagate(x, p, 1);
            for (std::size_t k = 0; k < cfg.K; ++k) {
                const CVector body(x.body(k).begin(), x.body(k).end());
                CHECK(oracle::max_abs_diff(CVector(y.body(k).begin(), y.body(k).end()),
                                           cyclic_shift(body, static_cast<std::ptrdiff_t>(d))) < 1e-15);
            }
        }
    }
    SUBCASE("Doppler is a phase ramp over the whole burst") {
        ChannelProfile p;
        p.taps = {PathTap{0, cd(1.0, 0.0), 1.0e5}};
        const BasebandFrame y = propagate(x, p, 1);
        const double step = 2.0 * kPi * 1.0e5 / cfg.bandwidth_hz;
        for (std::size_t n : {0u, 1u, 100u, 500u}) {
            CHECK(std::abs(y.samples()[n] - x.samples()[n] * std::polar(1.0, step * static_cast<double>(n))) < 1e-12);
        }
    }
    SUBCASE("noise is calibrated") {
        WaveformConfig big = cfg;
        big.K = 256;  // 18432 samples
        const BasebandFrame xb = random_frame(big, rng);
        ChannelProfile p;
        p.snr_db = 0.0;
        p.reference_power = 1.0;
        const BasebandFrame y = propagate(xb, p, 3);
        CVector noise(y.samples().size());
        for (std::size_t n = 0; n < noise.size(); ++n) noise[n] = y.samples()[n] - xb.samples()[n];
        CHECK(mean_power(noise) == doctest::Approx(1.0).epsilon(0.05));

        big.K = 512;  // > 1e5 samples
        const BasebandFrame xc = random_frame(big, rng);
        for (double snr : {-5.0, 10.0}) {
            ChannelProfile q;
            q.snr_db = snr;
            const BasebandFrame yc = propagate(xc, q, 4);
            CVector w(yc.samples().size());
            for (std::size_t n = 0; n < w.size(); ++n) w[n] = yc.samples()[n] - xc.samples()[n];
            CHECK(std::abs(power_db(mean_power(xc.samples()) / mean_power(w)) - snr) < 0.2);
        }
    }
    SUBCASE("interference is calibrated and placed at its offset") {
        WaveformConfig big = cfg;
        big.K = 512;
        const BasebandFrame xb = random_frame(big, rng);
        const BasebandFrame intf = random_frame(big, rng);
        ChannelProfile p;
        p.interferers.push_back(Interferer{intf, -10.0, std::size_t{7}});
        const BasebandFrame y = propagate(xb, p, 5);
        const std::size_t len = y.samples().size();
        CVector i(len);
        for (std::size_t n = 0; n < len; ++n) i[n] = y.samples()[n] - xb.samples()[n];
        CHECK(std::abs(power_db(mean_power(i) / mean_power(xb.samples())) + 10.0) < 0.2);
        const double a = std::sqrt(0.1 * mean_power(xb.samples()) / mean_power(intf.samples()));
        CHECK(std::abs(i[20] - a * intf.samples()[13]) < 1e-12);
        CHECK(std::abs(i[3] - a * intf.samples()[len - 4]) < 1e-12);
    }
    SUBCASE("linear without noise or clipping") {
        ChannelProfile p;
        p.taps = {PathTap{0, cd(0.6, 0.1), 250.0}, PathTap{2, cd(-0.3, 0.5), -40.0}};
        const cd a(1.5, -2.0);
        BasebandFrame ax = x;
        for (auto& v : ax.samples()) v *= a;
        const BasebandFrame y1 = propagate(ax, p, 1);
        const BasebandFrame y2 = propagate(x, p, 1);
        for (std::size_t n = 0; n < y1.samples().size(); ++n) {
            CHECK(std::abs(y1.samples()[n] - a * y2.samples()[n]) < 1e-12);
        }
    }
    SUBCASE("deterministic for a seed") {
        ChannelProfile p;
        p.snr_db = 3.0;
        p.interferers.push_back(Interferer{x, -3.0, std::nullopt});
        const BasebandFrame a = propagate(x, p, 99);
        const BasebandFrame b = propagate(x, p, 99);
        const BasebandFrame c = propagate(x, p, 100);
        CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
        CHECK_FALSE(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
    }
    SUBCASE("errors") {
        ChannelProfile p;
        p.taps = {PathTap{cfg.L_CP + 1}};
        CHECK_THROWS_AS(propagate(x, p, 1), ConfigError);
        p.taps.clear();
        CHECK_THROWS_AS(propagate(x, p, 1), ConfigError);
        WaveformConfig other = cfg;
        other.K = 2;
        ChannelProfile q;
        q.interferers.push_back(Interferer{random_frame(other, rng), -10.0, std::nullopt});
        CHECK_THROWS_AS(propagate(x, q, 1), DimensionError);
    }
}

TEST_CASE("radar echo taps") {
    const WaveformConfig cfg = WaveformConfig::scenario_one();
    const PathTap a = radar_echo(3.0, 0.0, cd(1.0, 0.0), cfg);
    CHECK(a.delay == 1);
    CHECK(a.doppler_hz == 0.0);
    const PathTap zero = radar_echo(0.0, 0.0, cd(1.0, 0.0), cfg);
    CHECK(zero.delay == 0);
    CHECK(zero.gain == cd(1.0, 0.0));
    const PathTap moving = radar_echo(30.0, 10.0, cd(0.5, 0.0), cfg);
    CHECK(moving.delay == 10);
    CHECK(moving.doppler_hz == doctest::Approx(2.0 * 10.0 * cfg.carrier_hz / kSpeedOfLight));
    CHECK(moving.gain == cd(0.5, 0.0));
    CHECK_THROWS_AS(radar_echo(100.0, 0.0, cd(1.0, 0.0), cfg), ConfigError);
    CHECK_THROWS_AS(radar_echo(-1.0, 0.0, cd(1.0, 0.0), cfg), ConfigError);
}
