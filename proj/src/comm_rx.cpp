#include "chirpwave/comm_rx.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "chirpwave/errors.hpp"

namespace chirpwave {

namespace {

std::uint64_t checked_power(std::uint64_t base, std::size_t exponent, std::uint64_t budget) {
    std::uint64_t v = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
        if (v > budget / base) {
            return budget + 1;
        }
        v *= base;
    }
    return v;
}

// all label combinations for `count` symbols, first symbol most significant
std::vector<CVector> enumerate_vectors(const CVector& points, std::size_t count) {
    const std::size_t q = points.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < count; ++i) {
        total *= q;
    }
    std::vector<CVector> out(total, CVector(count));
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (std::size_t i = count; i-- > 0;) {
            out[idx][i] = points[rest % q];
            rest /= q;
        }
    }
    return out;
}

// relative slack under which two metrics count as tied
constexpr double kTieTolerance = 1e-12;

}  // namespace

EquivalentChannel build_equivalent_channel(const WaveformConfig& cfg, const std::vector<PathTap>& taps,
                                           const ChirpSpec& chirp, double noise_var) {
    cfg.validate();
    chirp.validate(cfg);
    WaveformConfig one = cfg;
    one.K = 1;
    const std::size_t cols = data_symbols_per_symbol(cfg);
    ChannelProfile profile;
    profile.taps = taps;

    EquivalentChannel eq;
    eq.noise_var = noise_var;
    eq.matrix.resize(static_cast<Eigen::Index>(cfg.N), static_cast<Eigen::Index>(cols));
    CVector impulse(cols, cd{});
    for (std::size_t j = 0; j < cols; ++j) {
        impulse.assign(cols, cd{});
        impulse[j] = 1.0;
        BasebandFrame probe(one);
        const CVector sym = modulate_from_symbols(impulse, one, chirp.start_index);
        std::copy(sym.begin(), sym.end(), probe.symbol(0).begin());
        const BasebandFrame rx = propagate(probe, profile, 0);
        const auto body = rx.body(0);
        for (std::size_t n = 0; n < cfg.N; ++n) {
            eq.matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j)) = body[n];
        }
    }
    return eq;
}

MlDetector::MlDetector(const EquivalentChannel& eqch, const Constellation& alphabet, std::uint64_t budget)
    : h_(eqch.matrix),
      points_(alphabet.points()),
      bits_per_label_(alphabet.bits_per_symbol()),
      symbols_(static_cast<std::size_t>(eqch.matrix.cols())) {
    const std::uint64_t count = checked_power(points_.size(), symbols_, budget);
    if (count > budget) {
        throw NumericalError("ml_detect: Q^S hypothesis count exceeds the budget of " + std::to_string(budget) +
                             "; use LMMSE");
    }
    head_ = (symbols_ + 1) / 2;
    const std::size_t tail = symbols_ - head_;
    head_vectors_ = enumerate_vectors(points_, head_);
    tail_vectors_ = enumerate_vectors(points_, tail);

    const Eigen::MatrixXcd gram = h_.adjoint() * h_;
    auto quad_form = [&](const CVector& s, std::size_t offset) {
        cd acc{};
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (std::size_t j = 0; j < s.size(); ++j) {
                acc += std::conj(s[i]) * gram(static_cast<Eigen::Index>(offset + i), static_cast<Eigen::Index>(offset + j)) * s[j];
            }
        }
        return acc.real();
    };
    std::vector<double> head_quad(head_vectors_.size());
    std::vector<double> tail_quad(tail_vectors_.size());
    for (std::size_t a = 0; a < head_vectors_.size(); ++a) {
        head_quad[a] = quad_form(head_vectors_[a], 0);
    }
    for (std::size_t b = 0; b < tail_vectors_.size(); ++b) {
        tail_quad[b] = quad_form(tail_vectors_[b], head_);
    }
    quad_.resize(head_vectors_.size() * tail_vectors_.size());
    CVector cross(tail);
    for (std::size_t a = 0; a < head_vectors_.size(); ++a) {
        // cross[j] = sum_i conj(head_i) G(i, head + j)
        for (std::size_t j = 0; j < tail; ++j) {
            cd acc{};
            for (std::size_t i = 0; i < head_; ++i) {
                acc += std::conj(head_vectors_[a][i]) *
                       gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(head_ + j));
            }
            cross[j] = acc;
        }
        for (std::size_t b = 0; b < tail_vectors_.size(); ++b) {
            cd c{};
            for (std::size_t j = 0; j < tail; ++j) {
                c += cross[j] * tail_vectors_[b][j];
            }
            quad_[a * tail_vectors_.size() + b] = head_quad[a] + tail_quad[b] + 2.0 * c.real();
        }
    }
}

MlDetector::Hypothesis MlDetector::search(std::span<const cd> y) const {
    if (y.size() != static_cast<std::size_t>(h_.rows())) {
        throw DimensionError("ml_detect: received vector has " + std::to_string(y.size()) + " samples, channel has " +
                             std::to_string(h_.rows()) + " rows");
    }
    const Eigen::Map<const Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    const Eigen::VectorXcd z = h_.adjoint() * yv;
    const double y_energy = yv.squaredNorm();

    auto linear = [&](const std::vector<CVector>& vectors, std::size_t offset) {
        std::vector<double> out(vectors.size());
        for (std::size_t v = 0; v < vectors.size(); ++v) {
            double acc = 0.0;
            for (std::size_t i = 0; i < vectors[v].size(); ++i) {
                acc += (std::conj(vectors[v][i]) * z(static_cast<Eigen::Index>(offset + i))).real();
            }
            out[v] = acc;
        }
        return out;
    };
    const std::vector<double> head_lin = linear(head_vectors_, 0);
    const std::vector<double> tail_lin = linear(tail_vectors_, head_);

    const double slack = kTieTolerance * (y_energy + 1.0);
    Hypothesis best{0, std::numeric_limits<double>::infinity()};
    const std::size_t tail_count = tail_vectors_.size();
    for (std::size_t a = 0; a < head_vectors_.size(); ++a) {
        const double* quad_row = quad_.data() + a * tail_count;
        for (std::size_t b = 0; b < tail_count; ++b) {
            const double metric = quad_row[b] - 2.0 * (head_lin[a] + tail_lin[b]);
            if (metric < best.metric - slack) {
                best.metric = metric;
                best.index = a * tail_count + b;
            }
        }
    }
    best.metric += y_energy;
    return best;
}

Bits MlDetector::bits_of(std::uint64_t index) const {
    Bits out;
    out.reserve(symbols_ * bits_per_label_);
    const std::uint64_t q = points_.size();
    std::vector<std::uint32_t> labels(symbols_);
    for (std::size_t i = symbols_; i-- > 0;) {
        labels[i] = static_cast<std::uint32_t>(index % q);
        index /= q;
    }
    for (auto label : labels) {
        append_label_bits(label, bits_per_label_, out);
    }
    return out;
}

CVector MlDetector::symbols_of(std::uint64_t index) const {
    const std::size_t tail_count = tail_vectors_.size();
    CVector s = head_vectors_[index / tail_count];
    const CVector& t = tail_vectors_[index % tail_count];
    s.insert(s.end(), t.begin(), t.end());
    return s;
}

Bits ml_detect(std::span<const cd> y, const EquivalentChannel& eqch, const WaveformConfig& cfg, std::uint64_t budget) {
    const MlDetector detector(eqch, Constellation(cfg.constellation, cfg.Q), budget);
    return detector.bits_of(detector.search(y).index);
}

CmMlDetector::CmMlDetector(const WaveformConfig& cfg, const std::vector<PathTap>& taps, std::uint64_t budget)
    : cfg_(cfg), alphabet_(cfg.constellation, cfg.Q) {
    if (cfg.waveform != WaveformKind::DftSOfdmCm) {
        throw ConfigError("waveform: ml_detect_cm needs dft_s_ofdm_cm");
    }
    const std::uint64_t per_index = checked_power(cfg.Q, cfg.M, budget);
    if (per_index > budget || per_index * cfg.P > budget) {
        throw NumericalError("ml_detect_cm: P*Q^M hypothesis count exceeds the budget of " + std::to_string(budget) +
                             "; use LMMSE");
    }
    per_index_.reserve(cfg.P);
    for (std::size_t p = 0; p < cfg.P; ++p) {
        per_index_.emplace_back(build_equivalent_channel(cfg, taps, ChirpSpec{ChirpShape::Linear, p}), alphabet_, budget);
    }
}

Bits CmMlDetector::detect(std::span<const cd> y) const {
    // visit chirp labels in ascending bit order so ties keep the lowest pattern
    double best_metric = std::numeric_limits<double>::infinity();
    std::uint32_t best_label = 0;
    std::uint64_t best_index = 0;
    for (std::uint32_t label = 0; label < cfg_.P; ++label) {
        const auto hyp = per_index_[gray_decode(label)].search(y);
        const double slack = kTieTolerance * (std::abs(hyp.metric) + 1.0);
        if (hyp.metric < best_metric - slack) {
            best_metric = hyp.metric;
            best_label = label;
            best_index = hyp.index;
        }
    }
    Bits out;
    append_label_bits(best_label, log2_exact(cfg_.P), out);
    const Bits data = per_index_[gray_decode(best_label)].bits_of(best_index);
    out.insert(out.end(), data.begin(), data.end());
    return out;
}

Bits ml_detect_cm(std::span<const cd> y, const WaveformConfig& cfg, const std::vector<PathTap>& taps,
                  std::uint64_t budget) {
    return CmMlDetector(cfg, taps, budget).detect(y);
}

CVector lmmse_estimate(std::span<const cd> y, const EquivalentChannel& eqch) {
    const Eigen::MatrixXcd& h = eqch.matrix;
    if (y.size() != static_cast<std::size_t>(h.rows())) {
        throw DimensionError("lmmse_detect: received vector has " + std::to_string(y.size()) +
                             " samples, channel has " + std::to_string(h.rows()) + " rows");
    }
    if (eqch.noise_var < 0.0) {
        throw ConfigError("noise_var: must be non-negative");
    }
    const Eigen::Map<const Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    Eigen::MatrixXcd normal = h.adjoint() * h;
    normal.diagonal().array() += eqch.noise_var;
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(normal);
    if (!lu.isInvertible()) {
        throw NumericalError("lmmse_detect: normal matrix is singular (rank " + std::to_string(lu.rank()) + " of " +
                             std::to_string(normal.rows()) + ")");
    }
    const Eigen::VectorXcd estimate = lu.solve(h.adjoint() * yv);
    return CVector(estimate.data(), estimate.data() + estimate.size());
}

Bits lmmse_detect(std::span<const cd> y, const EquivalentChannel& eqch, const WaveformConfig& cfg) {
    return Constellation(cfg.constellation, cfg.Q).demap(lmmse_estimate(y, eqch));
}

ErrorCount count_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    if (tx.size() != rx.size()) {
        throw DimensionError("count_errors: length mismatch (" + std::to_string(tx.size()) + " vs " +
                             std::to_string(rx.size()) + ")");
    }
    ErrorCount c;
    c.total = tx.size();
    for (std::size_t i = 0; i < tx.size(); ++i) {
        c.errors += (tx[i] & 1u) != (rx[i] & 1u) ? 1u : 0u;
    }
    return c;
}

}  // namespace chirpwave
