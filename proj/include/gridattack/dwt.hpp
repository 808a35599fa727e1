#pragma once

#include <array>
#include <span>
#include <vector>

namespace gridattack {

// Daubechies 4-tap filter pair (2 vanishing moments): detail bands
// annihilate constant and linear signals away from the boundaries.
std::array<double, 4> db4_lowpass();
std::array<double, 4> db4_highpass();

/// Half-point symmetric fold of index m into [0, n):
/// ... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} x_{n-2} ...
int symmetric_index(int m, int n);

/// One analysis step with symmetric boundary extension. Outputs have
/// floor((n + 3) / 2) coefficients each:
///   cA[k] = sum_j lo[j] * x[sym(2k + 1 - j)]   (cD likewise with hi).
/// The redundancy at the edges makes the step exactly invertible.
void dwt_step(std::span<const double> x, std::vector<double>& approx, std::vector<double>& detail);

/// Multi-level decomposition. Returns levels + 1 sub-bands ordered
/// [cA_L, cD_L, cD_{L-1}, ..., cD_1]; five levels give the six bands used by
/// the feature extractor. Throws std::invalid_argument when the series is
/// shorter than the 4-tap filter support at any level.
std::vector<std::vector<double>> dwt_subbands(std::span<const double> series, int levels = 5);

}  // namespace gridattack
