#pragma once

#include <string>
#include <vector>

namespace w2w {

enum class LayerKind { conv, pool, dense };

struct LayerSpec {
    LayerKind kind;
    int filters = 0; // conv: output channels
    int kernel = 0;  // conv: square kernel side, stride 1, valid padding
    int window = 0;  // pool: square window and stride (average pooling)
    int units = 0;   // dense: output width
};

inline LayerSpec conv_layer(int filters, int kernel) { return {LayerKind::conv, filters, kernel, 0, 0}; }
inline LayerSpec pool_layer(int window) { return {LayerKind::pool, 0, 0, window, 0}; }
inline LayerSpec dense_layer(int units) { return {LayerKind::dense, 0, 0, 0, units}; }

struct Dims {
    int h = 0, w = 0, c = 0;
    int flat() const { return h * w * c; }
    bool operator==(const Dims&) const = default;
};

// Classifier layout. Every layer is followed by an inverted-dropout stage
// at dropout_rate (the terminal dense layer included). Hidden conv/dense
// outputs pass through ReLU; the terminal dense layer emits logits.
struct ArchSpec {
    std::vector<LayerSpec> layers;
    double dropout_rate = 0.3;
    int class_count = 0;
    Dims input;

    // Output dims of each layer; result[i] is what layers[i] produces.
    // Throws ConfigError on shape mismatches (kernel larger than its
    // input, non-dense terminal layer, terminal width != class_count, ...).
    std::vector<Dims> layer_dims() const;
    void validate() const { (void)layer_dims(); }

    std::string describe() const; // "conv 8 3 | pool 2 | dense 64 | dense 10"
};

ArchSpec parse_arch(const std::string& text, double dropout_rate, int class_count, Dims input);

// conv(8, 3x3) -> pool(2x2) -> dense(64) -> dense(C), dropout 0.3.
ArchSpec default_arch(int class_count, Dims input);

} // namespace w2w
