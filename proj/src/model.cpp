#include "w2w/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>

#include "w2w/errors.hpp"
#include "w2w/parallel.hpp"

namespace w2w {

namespace {

constexpr std::uint64_t kShuffleTag = 0x53485546ull; // "SHUF"
constexpr std::uint64_t kDropoutTag = 0x44524F50ull; // "DROP"

bool layer_uses_relu(const ArchSpec& arch, std::size_t i) {
    const LayerSpec& l = arch.layers[i];
    if (l.kind == LayerKind::conv) return true;
    if (l.kind == LayerKind::dense) return i + 1 < arch.layers.size(); // terminal dense emits logits
    return false;
}

void conv_forward(const double* in, Dims din, const LayerSpec& l, const double* wgt,
                  const double* bias, double* out, Dims dout) {
    const int K = l.kernel, Cin = din.c, F = l.filters;
    const int KC = K * Cin;
    for (int h = 0; h < dout.h; ++h) {
        for (int w = 0; w < dout.w; ++w) {
            double* op = &out[(static_cast<std::size_t>(h) * dout.w + w) * F];
            for (int f = 0; f < F; ++f) {
                const double* wp = &wgt[static_cast<std::size_t>(f) * K * KC];
                double s = bias[f];
                for (int i = 0; i < K; ++i) {
                    const double* row = &in[(static_cast<std::size_t>(h + i) * din.w + w) * Cin];
                    const double* wr = &wp[static_cast<std::size_t>(i) * KC];
                    for (int jc = 0; jc < KC; ++jc) s += row[jc] * wr[jc];
                }
                op[f] = s;
            }
        }
    }
}

void conv_backward(const double* in, Dims din, const LayerSpec& l, const double* wgt,
                   const double* d_pre, Dims dout, double* d_wgt, double* d_bias, double* d_in) {
    const int K = l.kernel, Cin = din.c, F = l.filters;
    const int KC = K * Cin;
    for (int h = 0; h < dout.h; ++h) {
        for (int w = 0; w < dout.w; ++w) {
            const double* gp = &d_pre[(static_cast<std::size_t>(h) * dout.w + w) * F];
            for (int f = 0; f < F; ++f) {
                const double g = gp[f];
                if (g == 0.0) continue;
                d_bias[f] += g;
                const double* wp = &wgt[static_cast<std::size_t>(f) * K * KC];
                double* dwp = &d_wgt[static_cast<std::size_t>(f) * K * KC];
                for (int i = 0; i < K; ++i) {
                    const std::size_t row_off = (static_cast<std::size_t>(h + i) * din.w + w) * Cin;
                    const double* row = &in[row_off];
                    double* drow = &d_in[row_off];
                    const double* wr = &wp[static_cast<std::size_t>(i) * KC];
                    double* dwr = &dwp[static_cast<std::size_t>(i) * KC];
                    for (int jc = 0; jc < KC; ++jc) {
                        dwr[jc] += g * row[jc];
                        drow[jc] += g * wr[jc];
                    }
                }
            }
        }
    }
}

void pool_forward(const double* in, Dims din, int p, double* out, Dims dout) {
    const int C = din.c;
    const double inv = 1.0 / (static_cast<double>(p) * p);
    for (int h = 0; h < dout.h; ++h) {
        for (int w = 0; w < dout.w; ++w) {
            double* op = &out[(static_cast<std::size_t>(h) * dout.w + w) * C];
            for (int c = 0; c < C; ++c) op[c] = 0.0;
            for (int i = 0; i < p; ++i) {
                const double* row = &in[(static_cast<std::size_t>(h * p + i) * din.w + w * p) * C];
                for (int j = 0; j < p; ++j)
                    for (int c = 0; c < C; ++c) op[c] += row[static_cast<std::size_t>(j) * C + c];
            }
            for (int c = 0; c < C; ++c) op[c] *= inv;
        }
    }
}

// Rows/columns cut off by the floor division receive no gradient.
void pool_backward(Dims din, int p, const double* d_pre, Dims dout, double* d_in) {
    const int C = din.c;
    const double inv = 1.0 / (static_cast<double>(p) * p);
    for (int h = 0; h < dout.h; ++h) {
        for (int w = 0; w < dout.w; ++w) {
            const double* gp = &d_pre[(static_cast<std::size_t>(h) * dout.w + w) * C];
            for (int i = 0; i < p; ++i) {
                double* row = &d_in[(static_cast<std::size_t>(h * p + i) * din.w + w * p) * C];
                for (int j = 0; j < p; ++j)
                    for (int c = 0; c < C; ++c) row[static_cast<std::size_t>(j) * C + c] += gp[c] * inv;
            }
        }
    }
}

void dense_forward(const double* in, int n_in, const double* wgt, const double* bias,
                   double* out, int n_out) {
    for (int o = 0; o < n_out; ++o) {
        const double* wr = &wgt[static_cast<std::size_t>(o) * n_in];
        double s = bias[o];
        for (int i = 0; i < n_in; ++i) s += wr[i] * in[i];
        out[o] = s;
    }
}

void dense_backward(const double* in, int n_in, const double* wgt, const double* d_pre,
                    int n_out, double* d_wgt, double* d_bias, double* d_in) {
    for (int o = 0; o < n_out; ++o) {
        const double g = d_pre[o];
        d_bias[o] += g;
        if (g == 0.0) continue;
        const double* wr = &wgt[static_cast<std::size_t>(o) * n_in];
        double* dwr = &d_wgt[static_cast<std::size_t>(o) * n_in];
        for (int i = 0; i < n_in; ++i) {
            dwr[i] += g * in[i];
            d_in[i] += g * wr[i];
        }
    }
}

void check_finite(const std::vector<double>& v, std::size_t layer) {
    double s = 0.0;
    for (double x : v) s += x;
    if (!std::isfinite(s))
        throw NumericError("forward: non-finite value at layer " + std::to_string(layer));
}

void add_into(Gradients& dst, const Gradients& src) {
    for (std::size_t l = 0; l < dst.layers.size(); ++l) {
        auto& dw = dst.layers[l].weights.data;
        const auto& sw = src.layers[l].weights.data;
        for (std::size_t i = 0; i < dw.size(); ++i) dw[i] += sw[i];
        auto& db = dst.layers[l].bias.data;
        const auto& sb = src.layers[l].bias.data;
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += sb[i];
    }
}

void zero_out(Gradients& g) {
    for (auto& l : g.layers) {
        std::fill(l.weights.data.begin(), l.weights.data.end(), 0.0);
        std::fill(l.bias.data.begin(), l.bias.data.end(), 0.0);
    }
}

} // namespace

bool is_probability_vector(const ProbabilityVector& p, double tol) {
    if (p.empty()) return false;
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

ProbabilityVector softmax_stable(const std::vector<double>& logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    ProbabilityVector p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

double quantize_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

ModelParameters init_model(const ArchSpec& spec, std::uint64_t seed) {
    const std::vector<Dims> dims = spec.layer_dims(); // validates
    ModelParameters params;
    params.arch = spec;
    params.layers.resize(spec.layers.size());
    Dims cur = spec.input;
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        const LayerSpec& l = spec.layers[i];
        LayerParams& lp = params.layers[i];
        Rng rng(mix_seed(seed, {static_cast<std::uint64_t>(i)}));
        if (l.kind == LayerKind::conv) {
            const int fan_in = l.kernel * l.kernel * cur.c;
            const double a = std::sqrt(6.0 / fan_in);
            lp.weights = Tensor({l.filters, l.kernel, l.kernel, cur.c});
            for (double& w : lp.weights.data) w = quantize_f32(rng.uniform(-a, a));
            lp.bias = Tensor({l.filters});
        } else if (l.kind == LayerKind::dense) {
            const int fan_in = cur.flat();
            const double a = std::sqrt(6.0 / fan_in);
            lp.weights = Tensor({l.units, fan_in});
            for (double& w : lp.weights.data) w = quantize_f32(rng.uniform(-a, a));
            lp.bias = Tensor({l.units});
        }
        cur = dims[i];
    }
    return params;
}

void TrainingConfig::validate() const {
    if (learning_rate < 0.0) throw ConfigError("training: learning_rate must be >= 0");
    if (weight_decay < 0.0) throw ConfigError("training: weight_decay must be >= 0");
    if (batch_size < 1) throw ConfigError("training: batch_size must be >= 1");
    if (max_epochs < 1) throw ConfigError("training: max_epochs must be >= 1");
}

Evaluator::Evaluator(const ModelParameters& params) : params_(&params), dims_(params.arch.layer_dims()) {
    const std::size_t L = params.arch.layers.size();
    pre_.resize(L);
    post_.resize(L);
    mask_.resize(L);
    d_buf_.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
        const std::size_t n = static_cast<std::size_t>(dims_[i].flat());
        pre_[i].resize(n);
        post_[i].resize(n);
        mask_[i].resize(n);
    }
}

void Evaluator::forward_pass(const Tensor& x, Rng* dropout_rng) {
    const ArchSpec& arch = params_->arch;
    if (x.size() != static_cast<std::size_t>(arch.input.flat()))
        throw DataError("forward: input has " + std::to_string(x.size()) + " values, arch expects " +
                        std::to_string(arch.input.flat()));

    const double rate = arch.dropout_rate;
    const bool dropping = dropout_rng != nullptr && rate > 0.0;
    const double keep_scale = dropping ? 1.0 / (1.0 - rate) : 1.0;

    const std::vector<double>* in = &x.data;
    Dims din = arch.input;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const LayerSpec& l = arch.layers[i];
        const LayerParams& lp = params_->layers[i];
        const Dims dout = dims_[i];
        switch (l.kind) {
        case LayerKind::conv:
            conv_forward(in->data(), din, l, lp.weights.data.data(), lp.bias.data.data(),
                         pre_[i].data(), dout);
            break;
        case LayerKind::pool:
            pool_forward(in->data(), din, l.window, pre_[i].data(), dout);
            break;
        case LayerKind::dense:
            dense_forward(in->data(), din.flat(), lp.weights.data.data(), lp.bias.data.data(),
                          pre_[i].data(), l.units);
            break;
        }
        check_finite(pre_[i], i);

        const bool relu = layer_uses_relu(arch, i);
        auto& mask = mask_[i];
        if (dropping) {
            for (double& m : mask) m = dropout_rng->next_double() < rate ? 0.0 : keep_scale;
        } else {
            std::fill(mask.begin(), mask.end(), 1.0);
        }
        auto& post = post_[i];
        const auto& pre = pre_[i];
        if (relu) {
            for (std::size_t k = 0; k < pre.size(); ++k)
                post[k] = pre[k] > 0.0 ? pre[k] * mask[k] : 0.0;
        } else {
            for (std::size_t k = 0; k < pre.size(); ++k) post[k] = pre[k] * mask[k];
        }

        in = &post;
        din = dout;
    }
    input_ = &x.data;
}

const std::vector<double>& Evaluator::logits(const Tensor& x, Rng* dropout_rng) {
    forward_pass(x, dropout_rng);
    return post_.back();
}

ProbabilityVector Evaluator::probabilities(const Tensor& x, Rng* dropout_rng) {
    return softmax_stable(logits(x, dropout_rng));
}

double Evaluator::loss_and_gradient(const Tensor& x, int label, Rng* dropout_rng, Gradients& accum) {
    const ArchSpec& arch = params_->arch;
    if (label < 1 || label > arch.class_count)
        throw DataError("loss: label " + std::to_string(label) + " outside [1, " +
                        std::to_string(arch.class_count) + "]");
    forward_pass(x, dropout_rng);

    const std::vector<double>& z = post_.back();
    const double m = *std::max_element(z.begin(), z.end());
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - m);
    lse = m + std::log(lse);
    const double loss = lse - z[static_cast<std::size_t>(label - 1)];

    // d(loss)/d(logits) = softmax - onehot
    d_cur_.resize(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) d_cur_[k] = std::exp(z[k] - lse);
    d_cur_[static_cast<std::size_t>(label - 1)] -= 1.0;

    for (std::size_t ii = arch.layers.size(); ii-- > 0;) {
        const LayerSpec& l = arch.layers[ii];
        const LayerParams& lp = params_->layers[ii];
        const Dims dout = dims_[ii];
        const Dims din = ii == 0 ? arch.input : dims_[ii - 1];
        const std::vector<double>& in = ii == 0 ? *input_ : post_[ii - 1];

        // d_cur_ currently holds dL/d(post); fold in dropout and ReLU.
        const bool relu = layer_uses_relu(arch, ii);
        const auto& mask = mask_[ii];
        const auto& pre = pre_[ii];
        for (std::size_t k = 0; k < d_cur_.size(); ++k) {
            double g = d_cur_[k] * mask[k];
            if (relu && pre[k] <= 0.0) g = 0.0;
            d_cur_[k] = g;
        }

        auto& d_in = d_buf_[ii];
        d_in.assign(static_cast<std::size_t>(din.flat()), 0.0);
        LayerParams& g = accum.layers[ii];
        switch (l.kind) {
        case LayerKind::conv:
            conv_backward(in.data(), din, l, lp.weights.data.data(), d_cur_.data(), dout,
                          g.weights.data.data(), g.bias.data.data(), d_in.data());
            break;
        case LayerKind::pool:
            pool_backward(din, l.window, d_cur_.data(), dout, d_in.data());
            break;
        case LayerKind::dense:
            dense_backward(in.data(), din.flat(), lp.weights.data.data(), d_cur_.data(), l.units,
                           g.weights.data.data(), g.bias.data.data(), d_in.data());
            break;
        }
        d_cur_.swap(d_in);
    }
    return loss;
}

ProbabilityVector forward(const ModelParameters& params, const Tensor& x) {
    Evaluator eval(params);
    return eval.probabilities(x, nullptr);
}

ProbabilityVector forward(const ModelParameters& params, const Tensor& x, Rng dropout_rng) {
    Evaluator eval(params);
    return eval.probabilities(x, &dropout_rng);
}

std::vector<double> forward_logits(const ModelParameters& params, const Tensor& x) {
    Evaluator eval(params);
    return eval.logits(x, nullptr);
}

std::vector<double> forward_logits(const ModelParameters& params, const Tensor& x, Rng dropout_rng) {
    Evaluator eval(params);
    return eval.logits(x, &dropout_rng);
}

double cross_entropy_loss(const ModelParameters& params, const Tensor& x, int label) {
    Evaluator eval(params);
    const std::vector<double>& z = eval.logits(x, nullptr);
    const double m = *std::max_element(z.begin(), z.end());
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - m);
    return m + std::log(lse) - z[static_cast<std::size_t>(label - 1)];
}

Gradients zero_gradients(const ModelParameters& params) {
    Gradients g;
    g.layers.resize(params.layers.size());
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
        g.layers[i].weights = Tensor(params.layers[i].weights.shape);
        g.layers[i].bias = Tensor(params.layers[i].bias.shape);
    }
    return g;
}

double sgd_epoch(ModelParameters& params, const std::vector<TrainSample>& data,
                 const TrainingConfig& cfg, std::uint64_t epoch_seed, int workers) {
    cfg.validate();
    if (data.empty()) throw DataError("sgd_epoch: empty dataset");
    if (cfg.batch_size > static_cast<int>(data.size()))
        throw ConfigError("training: batch_size " + std::to_string(cfg.batch_size) +
                          " exceeds dataset size " + std::to_string(data.size()));
    const int C = params.arch.class_count;
    for (const TrainSample& s : data)
        if (s.label < 1 || s.label > C)
            throw DataError("sgd_epoch: label " + std::to_string(s.label) + " outside [1, " +
                            std::to_string(C) + "] at sample id " + std::to_string(s.id));

    const std::size_t n = data.size();
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    Rng shuffle_rng(mix_seed(epoch_seed, {kShuffleTag}));
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[shuffle_rng.next_below(i + 1)]);

    // Per-sample gradients are summed within fixed-size chunks and the
    // chunk partials reduced in order, so the result is independent of
    // the worker count.
    constexpr int kChunk = 8;
    const int max_chunks = (cfg.batch_size + kChunk - 1) / kChunk;
    std::vector<Gradients> partial;
    std::vector<std::unique_ptr<Evaluator>> evals;
    for (int c = 0; c < max_chunks; ++c) {
        partial.push_back(zero_gradients(params));
        evals.push_back(std::make_unique<Evaluator>(params));
    }
    std::vector<double> partial_loss(static_cast<std::size_t>(max_chunks), 0.0);
    Gradients total = zero_gradients(params);

    const bool dropping = params.arch.dropout_rate > 0.0;
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
        const std::size_t bn = std::min<std::size_t>(cfg.batch_size, n - start);
        const std::size_t nchunks = (bn + kChunk - 1) / kChunk;
        parallel_for(nchunks, workers, [&](std::size_t c) {
            zero_out(partial[c]);
            partial_loss[c] = 0.0;
            const std::size_t lo = c * kChunk;
            const std::size_t hi = std::min(bn, lo + kChunk);
            for (std::size_t k = lo; k < hi; ++k) {
                const std::size_t pos = start + k;
                const TrainSample& s = data[perm[pos]];
                Rng rng(mix_seed(epoch_seed, {kDropoutTag, pos}));
                partial_loss[c] +=
                    evals[c]->loss_and_gradient(s.x, s.label, dropping ? &rng : nullptr, partial[c]);
            }
        });
        zero_out(total);
        double batch_loss = 0.0;
        for (std::size_t c = 0; c < nchunks; ++c) {
            add_into(total, partial[c]);
            batch_loss += partial_loss[c];
        }
        batch_loss /= static_cast<double>(bn);
        if (!std::isfinite(batch_loss))
            throw NumericError("sgd_epoch: non-finite loss in batch " + std::to_string(batches));

        const double inv_bn = 1.0 / static_cast<double>(bn);
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            auto update = [&](std::vector<double>& w, const std::vector<double>& g) {
                for (std::size_t i = 0; i < w.size(); ++i)
                    w[i] = quantize_f32(w[i] - cfg.learning_rate * (g[i] * inv_bn + cfg.weight_decay * w[i]));
            };
            update(params.layers[l].weights.data, total.layers[l].weights.data);
            update(params.layers[l].bias.data, total.layers[l].bias.data);
        }
        loss_sum += batch_loss;
        ++batches;
    }
    return loss_sum / batches;
}

} // namespace w2w
