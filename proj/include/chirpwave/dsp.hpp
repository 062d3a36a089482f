#pragma once

// Complex-vector primitives shared by every other module.
//
// All transforms use the unitary 1/sqrt(L) scaling in both directions, so
// energy is preserved and no compensation factors appear in PAPR or PMSR.
// Only power-of-two lengths are supported.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace chirpwave {

using cd = std::complex<double>;
using CVector = std::vector<cd>;
using Bits = std::vector<std::uint8_t>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

constexpr bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

/// log2 of a power of two. Throws ConfigError otherwise.
unsigned log2_exact(std::size_t v);

/// Unitary DFT (inverse == false) or inverse DFT. Length must be a power of two.
CVector dft(std::span<const cd> v, bool inverse = false);

/// In-place variant of dft().
void dft_inplace(std::span<cd> v, bool inverse = false);

/// r[d] = sum_n y[n] * conj(x[(n - d) mod N]), computed with two forward
/// transforms, one product and one inverse transform.
CVector circular_correlate(std::span<const cd> y, std::span<const cd> x);

/// Elementwise product a[i] * b[i].
CVector multiply(std::span<const cd> a, std::span<const cd> b);

/// Elementwise a[i] * conj(b[i]).
CVector multiply_conj(std::span<const cd> a, std::span<const cd> b);

/// Cyclic shift: out[n] = v[(n - shift) mod N] (a delay by `shift` samples).
CVector cyclic_shift(std::span<const cd> v, std::ptrdiff_t shift);

double energy(std::span<const cd> v);
double mean_power(std::span<const cd> v);
double peak_power(std::span<const cd> v);
bool all_finite(std::span<const cd> v);

}  // namespace chirpwave
