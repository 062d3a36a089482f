#include <doctest.h>

#include <random>

#include "chirpwave/comm_rx.hpp"
#include "chirpwave/errors.hpp"
#include "chirpwave/simulations.hpp"
#include "support/oracles.hpp"

using namespace chirpwave;

namespace {

WaveformConfig ber_config(WaveformKind kind, std::size_t m = 4) {
    WaveformConfig cfg = WaveformConfig::scenario_two();
    cfg.M = m;
    cfg.waveform = kind;
    return cfg;
}

CVector noiseless_body(const CVector& symbols, const WaveformConfig& cfg, const std::vector<PathTap>& taps,
                       std::size_t p = 0) {
    WaveformConfig one = cfg;
    one.K = 1;
    BasebandFrame f(one);
    const CVector sym = modulate_from_symbols(symbols, one, p);
    std::copy(sym.begin(), sym.end(), f.symbol(0).begin());
    ChannelProfile prof;
    prof.taps = taps;
    const BasebandFrame y = propagate(f, prof, 0);
    return CVector(y.body(0).begin(), y.body(0).end());
}

CVector add_noise(CVector y, double snr_db, std::mt19937_64& rng) {
    const CVector w = oracle::random_vector(y.size(), rng, std::pow(10.0, -snr_db / 10.0));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += w[i];
    return y;
}

CVector random_symbols(std::size_t count, const Constellation& c, std::mt19937_64& rng, std::uint64_t* index) {
    std::uniform_int_distribution<std::size_t> pick(0, c.order() - 1);
    CVector s(count);
    std::uint64_t idx = 0;
    for (auto& v : s) {
        const std::size_t label = pick(rng);
        v = c.points()[label];
        idx = idx * c.order() + label;
    }
    if (index) *index = idx;
    return s;
}

std::vector<PathTap> random_taps(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(1.0 / 6.0));
    std::vector<PathTap> taps(3);
    for (std::size_t l = 0; l < 3; ++l) {
        taps[l].delay = l;
        taps[l].gain = cd(g(rng), g(rng));
    }
    return taps;
}

}  // namespace

TEST_CASE("equivalent channel") {
    std::mt19937_64 rng(1);
    SUBCASE("identity channel without spreading or chirp is the identity") {
        WaveformConfig cfg = ber_config(WaveformKind::DftSOfdm, 16);
        const EquivalentChannel eq = build_equivalent_channel(cfg, {PathTap{}}, ChirpSpec{});
        CHECK((eq.matrix - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("identity channel with the chirp has orthogonal equal-norm columns") {
        // the body carries the symbol power per sample, so each column has norm sqrt(N/M)
        const WaveformConfig cfg = ber_config(WaveformKind::ChirpedDftSOfdm);
        const EquivalentChannel eq = build_equivalent_channel(cfg, {PathTap{}}, ChirpSpec{});
        CHECK(eq.matrix.rows() == 16);
        CHECK(eq.matrix.cols() == 4);
        const Eigen::MatrixXcd gram = eq.matrix.adjoint() * eq.matrix / 4.0;
        CHECK((gram - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("H s matches the modulator and channel for random s") {
        for (auto kind : {WaveformKind::DftSOfdm, WaveformKind::ChirpedDftSOfdm, WaveformKind::DftSOfdmCm,
                          WaveformKind::Ofdm, WaveformKind::Afdm, WaveformKind::Otfs}) {
            WaveformConfig cfg = ber_config(kind);
            cfg.P = 4;
            const auto taps = random_taps(rng);
            const std::size_t p = kind == WaveformKind::DftSOfdmCm ? 2 : 0;
            const EquivalentChannel eq = build_equivalent_channel(cfg, taps, ChirpSpec{ChirpShape::Linear, p});
            double worst = 0.0;
            for (int t = 0; t < 100; ++t) {
                const CVector s = oracle::random_vector(data_symbols_per_symbol(cfg), rng);
                const Eigen::VectorXcd hs =
                    eq.matrix * Eigen::Map<const Eigen::VectorXcd>(s.data(), static_cast<Eigen::Index>(s.size()));
                const CVector y = noiseless_body(s, cfg, taps, p);
                worst = std::max(worst, oracle::max_abs_diff(CVector(hs.data(), hs.data() + hs.size()), y));
            }
            INFO(to_string(kind));
            CHECK(worst < 1e-9);
        }
    }
}

TEST_CASE("ML detection") {
    std::mt19937_64 rng(2);
    const WaveformConfig cfg = ber_config(WaveformKind::ChirpedDftSOfdm);
    const Constellation qpsk(cfg.constellation, cfg.Q);

    SUBCASE("noiseless input is recovered") {
        for (int t = 0; t < 50; ++t) {
            const auto taps = random_taps(rng);
            const EquivalentChannel eq = build_equivalent_channel(cfg, taps, ChirpSpec{});
            const Bits bits = random_bits(8, rng);
            const CVector y = noiseless_body(qpsk.map(bits), cfg, taps);
            CHECK(ml_detect(y, eq, cfg) == bits);
        }
    }
    SUBCASE("all-zero input returns the lowest bit pattern") {
        const EquivalentChannel eq = build_equivalent_channel(cfg, {PathTap{}}, ChirpSpec{});
        const CVector y(cfg.N);
        CHECK(ml_detect(y, eq, cfg) == Bits(8, 0));
        WaveformConfig bpsk = cfg;
        bpsk.Q = 2;
        CHECK(ml_detect(y, build_equivalent_channel(bpsk, {PathTap{}}, ChirpSpec{}), bpsk) == Bits(4, 0));
    }
    SUBCASE("matches brute force, M = 2, 30 dB") {
        const WaveformConfig c2 = ber_config(WaveformKind::ChirpedDftSOfdm, 2);
        int mismatches = 0;
        for (int t = 0; t < 1000; ++t) {
            const auto taps = random_taps(rng);
            const EquivalentChannel eq = build_equivalent_channel(c2, taps, ChirpSpec{});
            const MlDetector det(eq, qpsk);
            const CVector y = add_noise(noiseless_body(random_symbols(2, qpsk, rng, nullptr), c2, taps), 30.0, rng);
            const auto brute = oracle::brute_force_ml(y, eq.matrix, qpsk.points());
            const auto got = det.search(y);
            mismatches += got.index == brute.index ? 0 : 1;
            CHECK(got.metric == doctest::Approx(brute.metric).epsilon(1e-9));
        }
        CHECK(mismatches == 0);
    }
    SUBCASE("returned metric is minimal over all hypotheses at low SNR") {
        for (int t = 0; t < 100; ++t) {
            const auto taps = random_taps(rng);
            const EquivalentChannel eq = build_equivalent_channel(cfg, taps, ChirpSpec{});
            const MlDetector det(eq, qpsk);
            const CVector y = add_noise(noiseless_body(random_symbols(4, qpsk, rng, nullptr), cfg, taps), 0.0, rng);
            const auto brute = oracle::brute_force_ml(y, eq.matrix, qpsk.points());
            CHECK(det.search(y).metric <= brute.metric * (1 + 1e-9) + 1e-12);
        }
    }
    SUBCASE("budget") {
        const EquivalentChannel eq = build_equivalent_channel(cfg, {PathTap{}}, ChirpSpec{});
        CHECK_THROWS_WITH_AS(ml_detect(CVector(cfg.N), eq, cfg, 100), doctest::Contains("use LMMSE"), NumericalError);
        WaveformConfig ofdm = cfg;
        ofdm.waveform = WaveformKind::Ofdm;  // 4^16 hypotheses
        const EquivalentChannel big = build_equivalent_channel(ofdm, {PathTap{}}, ChirpSpec{});
        CHECK_THROWS_AS(ml_detect(CVector(cfg.N), big, ofdm), NumericalError);
    }
    SUBCASE("folding the chirp into H equals detecting the dechirped signal") {
        const CVector c = make_chirp(ChirpSpec{}, cfg);
        for (int t = 0; t < 200; ++t) {
            const auto taps = random_taps(rng);
            const EquivalentChannel eq = build_equivalent_channel(cfg, taps, ChirpSpec{});
            const CVector y = add_noise(noiseless_body(random_symbols(4, qpsk, rng, nullptr), cfg, taps), 5.0, rng);
            EquivalentChannel dechirped = eq;
            CVector yd(y.size());
            for (std::size_t n = 0; n < y.size(); ++n) {
                yd[n] = y[n] * std::conj(c[n]);
                dechirped.matrix.row(static_cast<Eigen::Index>(n)) *= std::conj(c[n]);
            }
            CHECK(ml_detect(y, eq, cfg) == ml_detect(yd, dechirped, cfg));
        }
    }
}

TEST_CASE("joint ML over chirp index and data") {
    std::mt19937_64 rng(3);
    WaveformConfig cfg = ber_config(WaveformKind::DftSOfdmCm);
    cfg.P = 4;
    const Constellation qpsk(cfg.constellation, cfg.Q);

    SUBCASE("noiseless p = 2 frame") {
        const auto taps = random_taps(rng);
        Bits bits = chirp_bits_from_index(2, cfg.P);
        const Bits data = random_bits(8, rng);
        bits.insert(bits.end(), data.begin(), data.end());
        const CVector y = noiseless_body(qpsk.map(data), cfg, taps, 2);
        CHECK(ml_detect_cm(y, cfg, taps) == bits);
    }
    SUBCASE("P = 1 reduces to plain ML") {
        WaveformConfig p1 = cfg;
        p1.P = 1;
        WaveformConfig chirped = cfg;
        chirped.waveform = WaveformKind::ChirpedDftSOfdm;
        for (int t = 0; t < 50; ++t) {
            const auto taps = random_taps(rng);
            const CVector y = add_noise(noiseless_body(random_symbols(4, qpsk, rng, nullptr), chirped, taps), 3.0, rng);
            CHECK(ml_detect_cm(y, p1, taps) ==
                  ml_detect(y, build_equivalent_channel(chirped, taps, ChirpSpec{}), chirped));
        }
    }
    SUBCASE("matches brute force over P Q^M hypotheses, M = 2") {
        WaveformConfig c2 = cfg;
        c2.M = 2;
        int mismatches = 0;
        for (int t = 0; t < 1000; ++t) {
            const auto taps = random_taps(rng);
            const std::size_t p_true = static_cast<std::size_t>(rng() % c2.P);
            const CVector y =
                add_noise(noiseless_body(random_symbols(2, qpsk, rng, nullptr), c2, taps, p_true), 30.0, rng);
            double best = std::numeric_limits<double>::infinity();
            Bits expect;
            for (std::uint32_t label = 0; label < c2.P; ++label) {
                const std::size_t p = gray_decode(label);
                const auto eq = build_equivalent_channel(c2, taps, ChirpSpec{ChirpShape::Linear, p});
                const auto b = oracle::brute_force_ml(y, eq.matrix, qpsk.points());
                if (b.metric < best) {
                    best = b.metric;
                    expect = chirp_bits_from_index(p, c2.P);
                    for (int i = 1; i >= 0; --i) {
                        const auto lab = static_cast<std::uint32_t>((b.index >> (2 * i)) & 3u);
                        append_label_bits(lab, 2, expect);
                    }
                }
            }
            mismatches += ml_detect_cm(y, c2, taps) == expect ? 0 : 1;
        }
        CHECK(mismatches == 0);
    }
    SUBCASE("budget counts chirp hypotheses") {
        CHECK_THROWS_WITH_AS(CmMlDetector(cfg, {PathTap{}}, 255), doctest::Contains("use LMMSE"), NumericalError);
        CHECK_NOTHROW(CmMlDetector(cfg, {PathTap{}}, 1024));
    }
}

TEST_CASE("LMMSE") {
    std::mt19937_64 rng(4);
    SUBCASE("orthonormal columns at vanishing noise are zero forcing") {
        const WaveformConfig cfg = ber_config(WaveformKind::ChirpedDftSOfdm);
        EquivalentChannel eq = build_equivalent_channel(cfg, {PathTap{}}, ChirpSpec{});
        eq.noise_var = 1e-12;
        const Constellation qpsk(cfg.constellation, cfg.Q);
        const Bits bits = random_bits(8, rng);
        CHECK(lmmse_detect(noiseless_body(qpsk.map(bits), cfg, {PathTap{}}), eq, cfg) == bits);
    }
    SUBCASE("scalar channel") {
        EquivalentChannel eq;
        eq.matrix = Eigen::MatrixXcd::Constant(1, 1, cd(0.8, -0.6) * 0.7);
        eq.noise_var = 0.3;
        const cd h = eq.matrix(0, 0);
        const CVector y{cd(0.25, 0.4)};
        const CVector s = lmmse_estimate(y, eq);
        CHECK(std::abs(s[0] - std::conj(h) * y[0] / (std::norm(h) + 0.3)) < 1e-15);
    }
    SUBCASE("rank-deficient channel at zero noise") {
        EquivalentChannel eq;
        eq.matrix = Eigen::MatrixXcd::Zero(4, 2);
        eq.matrix(0, 0) = 1.0;
        eq.matrix(1, 0) = 1.0;
        eq.noise_var = 0.0;
        CHECK_THROWS_AS(lmmse_estimate(CVector(4), eq), NumericalError);
        eq.noise_var = 0.1;
        CHECK_NOTHROW(lmmse_estimate(CVector(4), eq));
    }
    SUBCASE("BER within 10x of ML at 40 dB") {
        for (auto kind : {WaveformKind::ChirpedDftSOfdm, WaveformKind::DftSOfdm}) {
            BerSetup setup;
            setup.cfg = ber_config(kind);
            setup.snr_db = {20.0, 40.0};
            setup.frames = 10000;
            setup.seed = 77;
            setup.detector = Detector::Ml;
            const auto ml = ber_sweep(setup);
            setup.detector = Detector::Lmmse;
            const auto lm = ber_sweep(setup);
            INFO(to_string(kind), " ML ", ml[1].errors, " LMMSE ", lm[1].errors);
            CHECK(lm[1].errors <= 10 * ml[1].errors);
            CHECK(lm[0].errors >= ml[0].errors);
        }
    }
}

TEST_CASE("error counting") {
    const Bits a{0, 1, 1, 0, 1, 0, 0, 1};
    Bits b = a;
    CHECK(count_errors(a, b).errors == 0);
    CHECK(count_errors(a, b).total == 8);
    for (auto& v : b) v ^= 1u;
    CHECK(count_errors(a, b).errors == 8);
    b = a;
    b[0] ^= 1u;
    b[3] ^= 1u;
    b[7] ^= 1u;
    CHECK(count_errors(a, b).errors == 3);
    CHECK(count_errors(a, b).rate() == doctest::Approx(3.0 / 8.0));
    CHECK_THROWS_AS(count_errors(a, Bits(3)), DimensionError);
    ErrorCount sum;
    sum += count_errors(a, b);
    sum += count_errors(a, a);
    CHECK(sum.errors == 3);
    CHECK(sum.total == 16);
}
