#pragma once

#include <vector>

namespace w2w {

// Same-length median filter. Edges are handled by replicating the first
// and last value (window-1)/2 times before filtering. Window must be odd
// (ConfigError otherwise); window 1 is the identity.
std::vector<double> median_filter(const std::vector<double>& signal, int window = 11);

// Population standard deviation over each sliding window. Output length is
// max(0, floor((len - window) / stride) + 1); an empty result simply means
// the signal is still shorter than one window. Window must be >= 2.
std::vector<double> sliding_std(const std::vector<double>& signal, int window = 40, int stride = 1);

// Stop once the most recent window's deviation drops below the threshold.
// Strict '<': a value exactly at the threshold keeps training.
bool should_stop(const std::vector<double>& std_series, double threshold = 0.01);

} // namespace w2w
