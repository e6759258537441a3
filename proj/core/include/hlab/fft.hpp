#ifndef HLAB_FFT_HPP
#define HLAB_FFT_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hlab/util.hpp"

namespace hlab {

/// In-place radix-2 DIT FFT, forward convention sum_j x_j e^{-2 pi i jk/n}.
/// n must be a power of two.
inline void fft_inplace(std::vector<cplx>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / double(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= double(n);
}

/// Frequency of DFT bin k for a length-n transform with sample spacing dx,
/// in angular units (matches multiplying by e^{i xi x}).
inline double fft_freq(std::size_t k, std::size_t n, double dx) {
    const double base = 2.0 * std::numbers::pi / (double(n) * dx);
    const std::ptrdiff_t kk = (k <= n / 2) ? std::ptrdiff_t(k) : std::ptrdiff_t(k) - std::ptrdiff_t(n);
    return base * double(kk);
}

}  // namespace hlab

#endif
