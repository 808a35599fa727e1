#pragma once

#include <array>
#include <span>

namespace gridattack {

/// Six summary statistics of a series, in fixed order:
/// [energy (sum x^2), max |x|, mean, L2 norm, skewness, kurtosis].
///
/// Skewness and kurtosis use population moments; kurtosis is the raw
/// (non-excess) m4/sigma^4. A series with (numerically) zero variance
/// reports skewness 0 and kurtosis 0. Throws std::invalid_argument on an
/// empty series.
std::array<double, 6> aggregate_stats(std::span<const double> series);

}  // namespace gridattack
