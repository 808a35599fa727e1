#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gridattack {

/// Discrete Fourier transform of an arbitrary-length complex sequence,
/// X[k] = sum_n x[n] exp(-2 pi i n k / N). Mixed-radix Cooley-Tukey;
/// prime lengths fall back to the direct sum.
std::vector<std::complex<double>> fft(std::span<const std::complex<double>> x);

/// One-sided magnitude spectrum |X[k]| for k = 0 .. floor(N/2).
/// Throws std::invalid_argument for series shorter than 2.
std::vector<double> dft_magnitudes(std::span<const double> series);

}  // namespace gridattack
