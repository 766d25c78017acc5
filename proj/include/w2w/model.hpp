#pragma once

#include <cstdint>
#include <vector>

#include "w2w/arch.hpp"
#include "w2w/rng.hpp"
#include "w2w/tensor.hpp"

namespace w2w {

// Length-C simplex point. Entries in [0, 1], summing to 1 within 1e-6.
using ProbabilityVector = std::vector<double>;

bool is_probability_vector(const ProbabilityVector& p, double tol = 1e-6);

// Max-subtracted softmax; finite for logits up to +-700 and beyond.
ProbabilityVector softmax_stable(const std::vector<double>& logits);

struct LayerParams {
    Tensor weights; // empty for pool layers
    Tensor bias;
};

// Parameter values are kept on the float32 grid (each double equals its
// own float32 rounding); arithmetic on them runs in double. Checkpoints
// store the raw float32 blob, so a save/load cycle is value-exact.
struct ModelParameters {
    ArchSpec arch;
    std::vector<LayerParams> layers; // aligned with arch.layers
    int format_version = 1;
};

// Fan-in-scaled uniform weights (+-sqrt(6/fan_in)), zero biases. Each
// layer draws from its own stream derived from (seed, layer index).
ModelParameters init_model(const ArchSpec& spec, std::uint64_t seed);

double quantize_f32(double v);

struct TrainingConfig {
    double learning_rate = 0.01;
    double weight_decay = 0.001;
    int batch_size = 64;
    int max_epochs = 300;
    std::uint64_t seed = 0;

    void validate() const;
};

// Preprocessed input plus 1-based label.
struct TrainSample {
    Tensor x;
    int label = 0;
    std::int64_t id = 0;
};

struct Gradients {
    std::vector<LayerParams> layers;
};

// Reusable forward/backward workspace bound to one ModelParameters.
// Parameters are treated as immutable while any Evaluator references
// them; use one Evaluator per thread.
class Evaluator {
public:
    explicit Evaluator(const ModelParameters& params);

    // Logits after the terminal dropout stage. dropout_rng == nullptr
    // disables dropout entirely. View is valid until the next call.
    const std::vector<double>& logits(const Tensor& x, Rng* dropout_rng);

    ProbabilityVector probabilities(const Tensor& x, Rng* dropout_rng);

    // Forward + backprop of the cross-entropy loss at the given label.
    // Adds parameter gradients into accum; returns the sample loss.
    double loss_and_gradient(const Tensor& x, int label, Rng* dropout_rng, Gradients& accum);

    const ModelParameters& params() const { return *params_; }

private:
    void forward_pass(const Tensor& x, Rng* dropout_rng);

    const ModelParameters* params_;
    std::vector<Dims> dims_;
    std::vector<std::vector<double>> pre_;  // layer output before ReLU/dropout
    std::vector<std::vector<double>> post_; // layer output fed to the next layer
    std::vector<std::vector<double>> mask_; // dropout multipliers
    std::vector<std::vector<double>> d_buf_;
    std::vector<double> d_cur_;
    const std::vector<double>* input_ = nullptr;
};

// One-shot convenience wrappers over Evaluator.
ProbabilityVector forward(const ModelParameters& params, const Tensor& x);                  // dropout off
ProbabilityVector forward(const ModelParameters& params, const Tensor& x, Rng dropout_rng); // dropout on
std::vector<double> forward_logits(const ModelParameters& params, const Tensor& x);
std::vector<double> forward_logits(const ModelParameters& params, const Tensor& x, Rng dropout_rng);

// Dropout-off loss as a pure function of (params, x, label); the finite-
// difference oracle in the tests perturbs parameters around this.
double cross_entropy_loss(const ModelParameters& params, const Tensor& x, int label);

Gradients zero_gradients(const ModelParameters& params);

// One full shuffled pass in mini-batches: w <- w - lr * (grad + wd * w),
// dropout active in the training forwards. Returns the mean over batches
// of the batch-mean loss. Gradient reduction order is fixed, so results
// do not depend on the worker count.
double sgd_epoch(ModelParameters& params, const std::vector<TrainSample>& data,
                 const TrainingConfig& cfg, std::uint64_t epoch_seed, int workers = 1);

} // namespace w2w
