#pragma once

#include <cstdint>
#include <vector>

namespace w2w {

// Two-cluster assignment over scalar values. Labels align with the input
// order; centroids satisfy c_low <= c_high and each equals the mean of its
// members (for a degenerate all-equal input both centroids equal that
// value and everything is assigned low).
struct ClusterAssignment {
    enum Label : std::uint8_t { low = 0, high = 1 };
    std::vector<std::uint8_t> labels;
    double centroid_low = 0.0;
    double centroid_high = 0.0;

    std::size_t count(Label which) const {
        std::size_t n = 0;
        for (auto l : labels) n += (l == which);
        return n;
    }
};

// Exact 1-D 2-means: the optimal contiguous cut in sorted order (every
// Lloyd fixed point is such a cut; this picks the best one directly, so
// results never depend on iteration luck). Deterministic. Distance ties
// at the midpoint land in the low cluster. max_iters is accepted for
// interface stability and ignored. Empty input -> DataError.
ClusterAssignment kmeans2_1d(const std::vector<double>& values, int max_iters = 100);

// |n_low - n_high| / N, the per-epoch cluster-size-difference statistic.
double delta_value(const ClusterAssignment& a);

} // namespace w2w
