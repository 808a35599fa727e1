#include "gridattack/dwt.hpp"

#include <cmath>
#include <stdexcept>

namespace gridattack {

namespace {
constexpr int kFilterLen = 4;
}

std::array<double, 4> db4_lowpass() {
    const double s3 = std::sqrt(3.0);
    const double s2 = std::sqrt(2.0);
    return {(1.0 + s3) / (4.0 * s2), (3.0 + s3) / (4.0 * s2), (3.0 - s3) / (4.0 * s2),
            (1.0 - s3) / (4.0 * s2)};
}

std::array<double, 4> db4_highpass() {
    const std::array<double, 4> lo = db4_lowpass();
    // g[j] = (-1)^j h[f-1-j]
    return {lo[3], -lo[2], lo[1], -lo[0]};
}

int symmetric_index(int m, int n) {
    const int period = 2 * n;
    int p = m % period;
    if (p < 0) p += period;
    return p < n ? p : period - 1 - p;
}

void dwt_step(std::span<const double> x, std::vector<double>& approx, std::vector<double>& detail) {
    const int n = static_cast<int>(x.size());
    if (n < kFilterLen) {
        throw std::invalid_argument("dwt_step: series shorter than the filter support");
    }
    static const std::array<double, 4> lo = db4_lowpass();
    static const std::array<double, 4> hi = db4_highpass();

    const int out_len = (n + kFilterLen - 1) / 2;
    approx.assign(static_cast<std::size_t>(out_len), 0.0);
    detail.assign(static_cast<std::size_t>(out_len), 0.0);
    for (int k = 0; k < out_len; ++k) {
        double a = 0.0, d = 0.0;
        for (int j = 0; j < kFilterLen; ++j) {
            const double v = x[static_cast<std::size_t>(symmetric_index(2 * k + 1 - j, n))];
            a += lo[static_cast<std::size_t>(j)] * v;
            d += hi[static_cast<std::size_t>(j)] * v;
        }
        approx[static_cast<std::size_t>(k)] = a;
        detail[static_cast<std::size_t>(k)] = d;
    }
}

std::vector<std::vector<double>> dwt_subbands(std::span<const double> series, int levels) {
    if (levels < 1) {
        throw std::invalid_argument("dwt_subbands: levels must be >= 1");
    }
    std::vector<std::vector<double>> details(static_cast<std::size_t>(levels));
    std::vector<double> current(series.begin(), series.end());
    std::vector<double> approx;
    for (int l = 0; l < levels; ++l) {
        dwt_step(current, approx, details[static_cast<std::size_t>(l)]);
        current = approx;
    }

    std::vector<std::vector<double>> bands;
    bands.reserve(static_cast<std::size_t>(levels) + 1);
    bands.push_back(std::move(current));  // cA_L
    for (int l = levels - 1; l >= 0; --l) {
        bands.push_back(std::move(details[static_cast<std::size_t>(l)]));
    }
    return bands;
}

}  // namespace gridattack
