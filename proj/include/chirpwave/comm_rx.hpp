#pragma once

// Communication receivers with perfect channel knowledge.
//
// The equivalent channel folds spreading, mapping, transforms, the (known)
// chirp and the multipath taps into one N x S matrix, S being the number of
// constellation symbols per slow-time symbol.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "chirpwave/channel.hpp"
#include "chirpwave/constellation.hpp"

namespace chirpwave {

inline constexpr std::uint64_t kDefaultMlBudget = std::uint64_t{1} << 20;

struct EquivalentChannel {
    Eigen::MatrixXcd matrix;
    double noise_var = 0.0;
};

/// Column j is the noiseless, prefix-free received body for a unit impulse
/// on symbol j, obtained by running the modulator and propagate().
EquivalentChannel build_equivalent_channel(const WaveformConfig& cfg, const std::vector<PathTap>& taps,
                                           const ChirpSpec& chirp, double noise_var = 0.0);

/// Exhaustive maximum-likelihood search over Q^S hypotheses. The quadratic
/// part of the metric is tabulated once per channel so repeated searches on
/// the same channel cost one table pass each.
class MlDetector {
public:
    MlDetector(const EquivalentChannel& eqch, const Constellation& alphabet,
               std::uint64_t budget = kDefaultMlBudget);

    struct Hypothesis {
        std::uint64_t index = 0;  // concatenated symbol labels, symbol 0 most significant
        double metric = 0.0;      // ||y - H s||^2
    };

    Hypothesis search(std::span<const cd> y) const;
    Bits bits_of(std::uint64_t index) const;
    CVector symbols_of(std::uint64_t index) const;
    std::uint64_t hypothesis_count() const { return quad_.size(); }

private:
    Eigen::MatrixXcd h_;
    CVector points_;
    unsigned bits_per_label_;
    std::size_t symbols_;
    std::size_t head_;  // symbols in the high-order half
    std::vector<CVector> head_vectors_;
    std::vector<CVector> tail_vectors_;
    std::vector<double> quad_;
};

/// argmin_s ||y - H s||^2; ties go to the lowest bit pattern. Throws
/// NumericalError (suggesting LMMSE) if Q^S exceeds `budget`.
Bits ml_detect(std::span<const cd> y, const EquivalentChannel& eqch, const WaveformConfig& cfg,
               std::uint64_t budget = kDefaultMlBudget);

/// Joint ML over chirp index p and data for DFT-s-OFDM-CM. Returns the
/// chirp bits followed by the data bits.
class CmMlDetector {
public:
    CmMlDetector(const WaveformConfig& cfg, const std::vector<PathTap>& taps,
                 std::uint64_t budget = kDefaultMlBudget);
    Bits detect(std::span<const cd> y) const;

private:
    WaveformConfig cfg_;
    Constellation alphabet_;
    std::vector<MlDetector> per_index_;
};

Bits ml_detect_cm(std::span<const cd> y, const WaveformConfig& cfg, const std::vector<PathTap>& taps,
                  std::uint64_t budget = kDefaultMlBudget);

/// s_hat = (H^H H + noise_var I)^-1 H^H y. Throws NumericalError when the
/// normal matrix is singular (rank-deficient H at noise_var 0).
CVector lmmse_estimate(std::span<const cd> y, const EquivalentChannel& eqch);

/// lmmse_estimate followed by per-symbol slicing.
Bits lmmse_detect(std::span<const cd> y, const EquivalentChannel& eqch, const WaveformConfig& cfg);

struct ErrorCount {
    std::uint64_t errors = 0;
    std::uint64_t total = 0;

    ErrorCount& operator+=(const ErrorCount& o) {
        errors += o.errors;
        total += o.total;
        return *this;
    }
    double rate() const { return total == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(total); }
};

ErrorCount count_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

}  // namespace chirpwave
