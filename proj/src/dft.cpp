#include "gridattack/dft.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace gridattack {

namespace {

using cd = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

int smallest_factor(int n) {
    for (int c = 2; c * c <= n; ++c) {
        if (n % c == 0) return c;
    }
    return n;
}

// w holds the root-of-unity table for the outermost length; a sub-transform
// of length n indexes it with stride root_n / n.
std::vector<cd> fft_rec(const std::vector<cd>& x, const std::vector<cd>& w, int root_n) {
    const int n = static_cast<int>(x.size());
    if (n == 1) return x;

    const int p = smallest_factor(n);
    const int m = n / p;
    std::vector<std::vector<cd>> sub(static_cast<std::size_t>(p));
    for (int r = 0; r < p; ++r) {
        std::vector<cd> s(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) s[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j * p + r)];
        sub[static_cast<std::size_t>(r)] = fft_rec(s, w, root_n);
    }

    const int stride = root_n / n;
    std::vector<cd> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        cd acc = 0.0;
        for (int r = 0; r < p; ++r) {
            const std::int64_t idx = (static_cast<std::int64_t>(r) * k % n) * stride;
            acc += w[static_cast<std::size_t>(idx)] * sub[static_cast<std::size_t>(r)][static_cast<std::size_t>(k % m)];
        }
        out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
}

}  // namespace

std::vector<cd> fft(std::span<const cd> x) {
    const int n = static_cast<int>(x.size());
    if (n == 0) return {};
    std::vector<cd> w(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double ang = -2.0 * kPi * j / n;
        w[static_cast<std::size_t>(j)] = cd(std::cos(ang), std::sin(ang));
    }
    return fft_rec(std::vector<cd>(x.begin(), x.end()), w, n);
}

std::vector<double> dft_magnitudes(std::span<const double> series) {
    if (series.size() < 2) {
        throw std::invalid_argument("dft_magnitudes: series shorter than 2");
    }
    std::vector<cd> x(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) x[i] = cd(series[i], 0.0);
    const std::vector<cd> spectrum = fft(x);
    std::vector<double> mags(series.size() / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) mags[k] = std::abs(spectrum[k]);
    return mags;
}

}  // namespace gridattack
