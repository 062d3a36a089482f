#include "chirpwave/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "chirpwave/errors.hpp"

namespace chirpwave {

namespace {

struct FftPlan {
    std::vector<std::size_t> bitrev;
    CVector twiddle;  // exp(-j 2 pi k / L), k < L/2
};

const FftPlan& plan_for(std::size_t len) {
    thread_local std::unordered_map<std::size_t, FftPlan> cache;
    auto it = cache.find(len);
    if (it != cache.end()) {
        return it->second;
    }
    FftPlan plan;
    const unsigned bits = log2_exact(len);
    plan.bitrev.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        std::size_t r = 0;
        for (unsigned b = 0; b < bits; ++b) {
            r |= ((i >> b) & 1u) << (bits - 1 - b);
        }
        plan.bitrev[i] = r;
    }
    plan.twiddle.resize(len / 2);
    for (std::size_t k = 0; k < len / 2; ++k) {
        plan.twiddle[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(len));
    }
    return cache.emplace(len, std::move(plan)).first->second;
}

void require_same_length(std::span<const cd> a, std::span<const cd> b, const char* what) {
    if (a.size() != b.size()) {
        throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()) + ")");
    }
}

}  // namespace

unsigned log2_exact(std::size_t v) {
    if (!is_power_of_two(v)) {
        throw ConfigError("length " + std::to_string(v) + " is not a power of two");
    }
    unsigned r = 0;
    while ((std::size_t{1} << r) < v) {
        ++r;
    }
    return r;
}

void dft_inplace(std::span<cd> v, bool inverse) {
    const std::size_t len = v.size();
    const FftPlan& plan = plan_for(len);
    for (std::size_t i = 0; i < len; ++i) {
        if (i < plan.bitrev[i]) {
            std::swap(v[i], v[plan.bitrev[i]]);
        }
    }
    // iterative radix-2 butterflies
    for (std::size_t half = 1; half < len; half <<= 1) {
        const std::size_t stride = len / (2 * half);
        for (std::size_t start = 0; start < len; start += 2 * half) {
            for (std::size_t j = 0; j < half; ++j) {
                cd w = plan.twiddle[j * stride];
                if (inverse) {
                    w = std::conj(w);
                }
                const cd t = w * v[start + j + half];
                v[start + j + half] = v[start + j] - t;
                v[start + j] += t;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(len));
    for (auto& x : v) {
        x *= scale;
    }
}

CVector dft(std::span<const cd> v, bool inverse) {
    CVector out(v.begin(), v.end());
    dft_inplace(out, inverse);
    return out;
}

CVector circular_correlate(std::span<const cd> y, std::span<const cd> x) {
    require_same_length(y, x, "circular_correlate");
    CVector yf = dft(y);
    const CVector xf = dft(x);
    for (std::size_t k = 0; k < yf.size(); ++k) {
        yf[k] *= std::conj(xf[k]);
    }
    dft_inplace(yf, true);
    const double scale = std::sqrt(static_cast<double>(yf.size()));
    for (auto& r : yf) {
        r *= scale;
    }
    return yf;
}

CVector multiply(std::span<const cd> a, std::span<const cd> b) {
    require_same_length(a, b, "multiply");
    CVector out(a.size());
    std::transform(a.begin(), a.end(), b.begin(), out.begin(), [](cd p, cd q) { return p * q; });
    return out;
}

CVector multiply_conj(std::span<const cd> a, std::span<const cd> b) {
    require_same_length(a, b, "multiply_conj");
    CVector out(a.size());
    std::transform(a.begin(), a.end(), b.begin(), out.begin(), [](cd p, cd q) { return p * std::conj(q); });
    return out;
}

CVector cyclic_shift(std::span<const cd> v, std::ptrdiff_t shift) {
    const auto len = static_cast<std::ptrdiff_t>(v.size());
    CVector out(v.size());
    if (len == 0) {
        return out;
    }
    const std::ptrdiff_t s = ((shift % len) + len) % len;
    for (std::ptrdiff_t n = 0; n < len; ++n) {
        out[static_cast<std::size_t>((n + s) % len)] = v[static_cast<std::size_t>(n)];
    }
    return out;
}

double energy(std::span<const cd> v) {
    double e = 0.0;
    for (const auto& x : v) {
        e += std::norm(x);
    }
    return e;
}

double mean_power(std::span<const cd> v) {
    return v.empty() ? 0.0 : energy(v) / static_cast<double>(v.size());
}

double peak_power(std::span<const cd> v) {
    double p = 0.0;
    for (const auto& x : v) {
        p = std::max(p, std::norm(x));
    }
    return p;
}

bool all_finite(std::span<const cd> v) {
    return std::all_of(v.begin(), v.end(),
                       [](cd x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

}  // namespace chirpwave
