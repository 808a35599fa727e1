#include "gridattack/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace gridattack {

std::array<double, 6> aggregate_stats(std::span<const double> series) {
    if (series.empty()) {
        throw std::invalid_argument("aggregate_stats: empty series");
    }
    const double n = static_cast<double>(series.size());

    double energy = 0.0;
    double absmax = 0.0;
    double sum = 0.0;
    for (double x : series) {
        energy += x * x;
        absmax = std::max(absmax, std::fabs(x));
        sum += x;
    }
    const double mean = sum / n;
    const double l2 = std::sqrt(energy);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : series) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    const double sd = std::sqrt(m2);
    double skewness = 0.0;
    double kurtosis = 0.0;
    // zero-variance convention, with a relative floor so constant series hit
    // it despite rounding in the mean
    if (sd > 1e-12 * absmax && sd > 0.0) {
        skewness = m3 / (sd * sd * sd);
        kurtosis = m4 / (m2 * m2);
    }
    return {energy, absmax, mean, l2, skewness, kurtosis};
}

}  // namespace gridattack
