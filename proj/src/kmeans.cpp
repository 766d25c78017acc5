#include "w2w/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "w2w/errors.hpp"

namespace w2w {

ClusterAssignment kmeans2_1d(const std::vector<double>& values, int max_iters) {
    (void)max_iters; // direct solver, no iteration cap needed
    if (values.empty()) throw DataError("kmeans2_1d: empty input");
    for (double v : values)
        if (!std::isfinite(v)) throw DataError("kmeans2_1d: non-finite input value");

    const std::size_t n = values.size();
    ClusterAssignment out;
    out.labels.assign(n, ClusterAssignment::low);

    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    if (*mn_it == *mx_it) { // fully degenerate: one cluster, low by convention
        out.centroid_low = out.centroid_high = *mn_it;
        return out;
    }

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return values[a] < values[b]; });

    // The 2-means optimum in 1-D is a cut in sorted order; scan all cuts
    // with prefix sums. SSE ties prefer the larger low cluster, which is
    // what puts a midpoint-equidistant value into the low cluster.
    std::vector<double> psum(n + 1, 0.0), psq(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = values[order[i]];
        psum[i + 1] = psum[i] + v;
        psq[i + 1] = psq[i] + v * v;
    }
    double best_sse = 0.0;
    std::size_t best_cut = 0;
    for (std::size_t cut = 1; cut < n; ++cut) {
        const double s1 = psum[cut], s2 = psum[n] - psum[cut];
        const double q1 = psq[cut], q2 = psq[n] - psq[cut];
        const double sse = (q1 - s1 * s1 / static_cast<double>(cut)) +
                           (q2 - s2 * s2 / static_cast<double>(n - cut));
        if (best_cut == 0 || sse <= best_sse) {
            best_sse = sse;
            best_cut = cut;
        }
    }

    for (std::size_t i = best_cut; i < n; ++i) out.labels[order[i]] = ClusterAssignment::high;

    double sum_low = 0.0, sum_high = 0.0;
    for (std::size_t i = 0; i < best_cut; ++i) sum_low += values[order[i]];
    for (std::size_t i = best_cut; i < n; ++i) sum_high += values[order[i]];
    out.centroid_low = sum_low / static_cast<double>(best_cut);
    out.centroid_high = sum_high / static_cast<double>(n - best_cut);
    return out;
}

double delta_value(const ClusterAssignment& a) {
    auto n_low = static_cast<double>(a.count(ClusterAssignment::low));
    auto n_high = static_cast<double>(a.count(ClusterAssignment::high));
    return std::abs(n_low - n_high) / static_cast<double>(a.labels.size());
}

} // namespace w2w
