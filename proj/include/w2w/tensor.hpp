#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace w2w {

// Dense row-major value tensor. Shapes used throughout:
//   images           {H, W, C}
//   conv weights     {filters, k, k, in_channels}
//   dense weights    {out, in}
//   biases           {n}
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(element_count(shape), 0.0) {}
    Tensor(std::vector<int> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {}

    static std::size_t element_count(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) n *= static_cast<std::size_t>(d);
        return s.empty() ? 0 : n;
    }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }
};

inline bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

} // namespace w2w
