#include "w2w/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "w2w/errors.hpp"

namespace w2w {

std::vector<double> median_filter(const std::vector<double>& signal, int window) {
    if (window < 1 || window % 2 == 0)
        throw ConfigError("median_filter: window must be odd and >= 1, got " + std::to_string(window));
    if (signal.empty()) return {};

    const std::size_t n = signal.size();
    const std::size_t half = static_cast<std::size_t>(window) / 2;

    std::vector<double> padded;
    padded.reserve(n + 2 * half);
    padded.insert(padded.end(), half, signal.front());
    padded.insert(padded.end(), signal.begin(), signal.end());
    padded.insert(padded.end(), half, signal.back());

    std::vector<double> out(n);
    std::vector<double> buf(static_cast<std::size_t>(window));
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(padded.begin() + static_cast<std::ptrdiff_t>(i),
                  padded.begin() + static_cast<std::ptrdiff_t>(i) + window, buf.begin());
        auto mid = buf.begin() + window / 2;
        std::nth_element(buf.begin(), mid, buf.end());
        out[i] = *mid;
    }
    return out;
}

std::vector<double> sliding_std(const std::vector<double>& signal, int window, int stride) {
    if (window < 2)
        throw ConfigError("sliding_std: window must be >= 2, got " + std::to_string(window));
    if (stride < 1)
        throw ConfigError("sliding_std: stride must be >= 1, got " + std::to_string(stride));

    const std::size_t n = signal.size();
    const std::size_t w = static_cast<std::size_t>(window);
    if (n < w) return {};

    std::vector<double> out;
    out.reserve((n - w) / static_cast<std::size_t>(stride) + 1);
    for (std::size_t start = 0; start + w <= n; start += static_cast<std::size_t>(stride)) {
        double mean = 0.0;
        for (std::size_t i = 0; i < w; ++i) mean += signal[start + i];
        mean /= static_cast<double>(w);
        double var = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            double d = signal[start + i] - mean;
            var += d * d;
        }
        out.push_back(std::sqrt(var / static_cast<double>(w)));
    }
    return out;
}

bool should_stop(const std::vector<double>& std_series, double threshold) {
    return !std_series.empty() && std_series.back() < threshold;
}

} // namespace w2w
