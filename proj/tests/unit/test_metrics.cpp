#include <doctest.h>

#include <algorithm>
#include <random>

#include "chirpwave/constellation.hpp"
#include "chirpwave/errors.hpp"
#include "chirpwave/metrics.hpp"
#include "chirpwave/simulations.hpp"
#include "chirpwave/waveforms.hpp"
#include "support/oracles.hpp"

using namespace chirpwave;

namespace {

std::uint64_t lg(std::uint64_t v) {
    std::uint64_t r = 0;
    while ((1ULL << r) < v) ++r;
    return r;
}

}  // namespace

TEST_CASE("PAPR") {
    std::mt19937_64 rng(1);
    CHECK(papr_db(CVector(8, cd(0.3, -0.2))) == doctest::Approx(0.0));
    CHECK_THROWS_AS(papr_db(CVector(8)), UndefinedMetricError);
    CHECK_THROWS_AS(papr_db(CVector{}), UndefinedMetricError);

    SUBCASE("PSK chirped body is 0 dB") {
        WaveformConfig cfg;
        cfg.constellation = ConstellationKind::Psk;
        cfg.Q = 8;
        const CVector x = modulate_symbol(random_bits(bits_per_symbol(cfg), rng), cfg);
        CHECK(std::abs(papr_db(std::span<const cd>(x).subspan(cfg.L_CP))) < 1e-9);
    }
    SUBCASE("16-QAM block holding every point once gives 10 log10 1.8") {
        WaveformConfig cfg;
        cfg.waveform = WaveformKind::DftSOfdm;
        cfg.M = 16;
        cfg.Q = 16;
        const Constellation c(ConstellationKind::Qam, 16);
        const CVector x = modulate_dft_s_ofdm(c.points(), cfg);
        CHECK(papr_db(std::span<const cd>(x).subspan(cfg.L_CP)) == doctest::Approx(2.5527).epsilon(1e-4));
    }
    SUBCASE("interleaved DFT-s-OFDM body PAPR equals the symbol-block PAPR") {
        const Constellation c(ConstellationKind::Qam, 16);
        for (auto [m, n] : {std::pair{4u, 16u}, std::pair{8u, 64u}, std::pair{128u, 256u}}) {
            WaveformConfig cfg;
            cfg.N = n;
            cfg.M = m;
            cfg.L_CP = n / 8;
            for (int t = 0; t < 20; ++t) {
                const CVector s = c.map(random_bits(4 * m, rng));
                const CVector x = modulate_dft_s_ofdm(s, cfg);
                CHECK(std::abs(papr_db(std::span<const cd>(x).subspan(cfg.L_CP)) - papr_db(s)) < 1e-9);
            }
        }
    }
    SUBCASE("any unit-modulus product keeps PAPR") {
        const CVector x = oracle::random_vector(64, rng);
        CVector y = x;
        std::uniform_real_distribution<double> ph(0, 2 * kPi);
        for (auto& v : y) v *= std::polar(1.0, ph(rng));
        CHECK(std::abs(papr_db(x) - papr_db(y)) < 1e-12);
    }
}

TEST_CASE("CCDF") {
    SUBCASE("step for equal samples") {
        const std::vector<double> s(10, 3.0);
        const MetricSeries c = ccdf(s, {2.0, 2.999, 3.0, 4.0});
        CHECK(c.points[0].y == 1.0);
        CHECK(c.points[1].y == 1.0);
        CHECK(c.points[2].y == 0.0);
        CHECK(c.points[3].y == 0.0);
    }
    SUBCASE("counting oracle, monotone, within [0, 1]") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 10.0);
        std::vector<double> s(1000);
        for (auto& v : s) v = std::round(u(rng) * 4) / 4;  // on a 0.25 grid to hit exact ties
        std::vector<double> th;
        for (int i = 0; i <= 40; ++i) th.push_back(i * 0.25);
        const MetricSeries c = ccdf(s, th);
        for (std::size_t i = 0; i < th.size(); ++i) {
            const auto count = std::count_if(s.begin(), s.end(), [&](double v) { return v > th[i]; });
            CHECK(c.points[i].y == static_cast<double>(count) / 1000.0);
            CHECK(c.points[i].y >= 0.0);
            CHECK(c.points[i].y <= 1.0);
            if (i > 0) CHECK(c.points[i].y <= c.points[i - 1].y);
        }
    }
    SUBCASE("quantile helper") {
        std::vector<double> s;
        for (int i = 1; i <= 1000; ++i) s.push_back(i);
        const double lambda = lambda_at_ccdf(s, 1e-2);
        const auto above = std::count_if(s.begin(), s.end(), [&](double v) { return v > lambda; });
        CHECK(above <= 10);
        CHECK(std::count_if(s.begin(), s.end(), [&](double v) { return v >= lambda; }) > 10);
    }
    SUBCASE("no samples") { CHECK_THROWS_AS(ccdf(std::vector<double>{}, {1.0}), UndefinedMetricError); }
    SUBCASE("OFDM needs more than 2.5 dB extra at 1e-2 (4-QAM, N = 256)") {
        WaveformConfig cfg;
        cfg.waveform = WaveformKind::Ofdm;
        const double ofdm = lambda_at_ccdf(papr_samples(cfg, 20000, 1), 1e-2);
        cfg.waveform = WaveformKind::DftSOfdm;
        const double dfts = lambda_at_ccdf(papr_samples(cfg, 20000, 2), 1e-2);
        CHECK(ofdm - dfts > 2.5);
    }
}

TEST_CASE("spectral efficiency") {
    WaveformConfig cfg = WaveformConfig::scenario_one();
    CHECK(spectral_efficiency(cfg) == doctest::Approx(1.0));
    cfg.waveform = WaveformKind::DftSOfdmCm;
    cfg.P = 4;
    CHECK(spectral_efficiency(cfg) == doctest::Approx(258.0 / 256.0));
    cfg.P = 1;
    CHECK(spectral_efficiency(cfg) == doctest::Approx(1.0));
    cfg.waveform = WaveformKind::Ofdm;
    CHECK(spectral_efficiency(cfg) == doctest::Approx(2.0));
    cfg.waveform = WaveformKind::Fmcw;
    CHECK(spectral_efficiency(cfg) == 0.0);
}

TEST_CASE("modulation complexity") {
    WaveformConfig cfg = WaveformConfig::scenario_one();
    cfg.waveform = WaveformKind::Otfs;
    CHECK(modulation_complexity(cfg).normalized_to_ofdm == doctest::Approx(1.875));

    cfg.M_otfs = 16;
    cfg.N_otfs = 16;
    const auto otfs = modulation_complexity(cfg).multiplications;
    cfg.waveform = WaveformKind::ChirpedDftSOfdm;
    const auto chirped = modulation_complexity(cfg).multiplications;
    CHECK(chirped == 3200);
    CHECK(otfs == 3072);
    CHECK(static_cast<double>(chirped) / static_cast<double>(otfs) == doctest::Approx(1.0417).epsilon(1e-4));

    cfg.M = 32;
    cfg.waveform = WaveformKind::Afdm;
    const auto afdm = modulation_complexity(cfg).multiplications;
    cfg.waveform = WaveformKind::ChirpedDftSOfdm;
    CHECK(afdm == 2560);
    CHECK(modulation_complexity(cfg).multiplications == 2464);

    SUBCASE("both difference formulas hold for every power-of-two size up to 2^10") {
        for (std::uint64_t en = 1; en <= 10; ++en) {
            for (std::uint64_t em = 0; em <= en; ++em) {
                for (std::uint64_t eo = 0; eo <= en; ++eo) {
                    WaveformConfig c;
                    c.N = 1ULL << en;
                    c.M = 1ULL << em;
                    c.M_otfs = 1ULL << eo;
                    c.N_otfs = c.N / c.M_otfs;
                    const auto n = static_cast<std::int64_t>(c.N);
                    const auto m = static_cast<std::int64_t>(c.M);
                    c.waveform = WaveformKind::ChirpedDftSOfdm;
                    const auto ch = static_cast<std::int64_t>(modulation_complexity(c).multiplications);
                    c.waveform = WaveformKind::Otfs;
                    const auto ot = static_cast<std::int64_t>(modulation_complexity(c).multiplications);
                    c.waveform = WaveformKind::Afdm;
                    const auto af = static_cast<std::int64_t>(modulation_complexity(c).multiplications);
                    CHECK(ot - ch == n * static_cast<std::int64_t>(lg(c.M_otfs)) - m * static_cast<std::int64_t>(lg(c.M)) - n);
                    CHECK(af - ch == n - m * static_cast<std::int64_t>(lg(c.M)));
                }
            }
        }
    }
}
