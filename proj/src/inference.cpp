#include "w2w/inference.hpp"

#include <algorithm>

#include "w2w/errors.hpp"
#include "w2w/format.hpp"
#include "w2w/parallel.hpp"
#include "w2w/rng.hpp"

namespace w2w {

namespace {

constexpr std::uint64_t kInferTag = 0x494E4652ull; // "INFR"

Prediction infer_one(Evaluator& wise_eval, Evaluator& wiped_eval, double u_th, const Tensor& x,
                     const McConfig& mc_cfg) {
    Prediction pred;
    pred.u_star = total_uncertainty(decompose(mc_predict(wise_eval, x, mc_cfg)));
    pred.class_probabilities = wiped_eval.probabilities(x, nullptr);
    pred.label = argmax_label(pred.class_probabilities);
    pred.tag = pred.u_star <= u_th ? ConfidenceTag::confident : ConfidenceTag::not_confident;
    return pred;
}

} // namespace

std::string to_string(ConfidenceTag t) {
    return t == ConfidenceTag::confident ? "confident" : "not-confident";
}

int argmax_label(const ProbabilityVector& p) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(p.size()); ++i)
        if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(best)]) best = i;
    return best + 1; // labels are 1-based
}

McConfig per_sample_mc(const McConfig& mc_cfg, std::int64_t id) {
    McConfig per = mc_cfg;
    per.base_seed = mix_seed(mc_cfg.base_seed, {kInferTag, static_cast<std::uint64_t>(id)});
    return per;
}

Prediction infer(const ModelParameters& wise, const ModelParameters& wiped, double u_th,
                 const Tensor& x, const McConfig& mc_cfg) {
    if (u_th < 0.0) throw ConfigError("infer: u_th must be >= 0");
    mc_cfg.validate();
    Evaluator wise_eval(wise), wiped_eval(wiped);
    return infer_one(wise_eval, wiped_eval, u_th, x, mc_cfg);
}

std::vector<Prediction> infer_batch(const ModelParameters& wise, const ModelParameters& wiped,
                                    double u_th, const std::vector<TrainSample>& samples,
                                    const McConfig& mc_cfg, int workers) {
    if (u_th < 0.0) throw ConfigError("infer: u_th must be >= 0");
    mc_cfg.validate();
    std::vector<Prediction> out(samples.size());
    constexpr std::size_t kChunk = 64;
    const std::size_t nchunks = (samples.size() + kChunk - 1) / kChunk;
    parallel_for(nchunks, workers, [&](std::size_t c) {
        Evaluator wise_eval(wise), wiped_eval(wiped);
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(samples.size(), lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i)
            out[i] = infer_one(wise_eval, wiped_eval, u_th, samples[i].x,
                               per_sample_mc(mc_cfg, samples[i].id));
    });
    return out;
}

void write_predictions(std::ostream& out, const std::vector<TrainSample>& samples,
                       const std::vector<Prediction>& preds) {
    if (samples.size() != preds.size())
        throw DataError("predictions: " + std::to_string(samples.size()) + " samples vs " +
                        std::to_string(preds.size()) + " predictions");
    out << "id,true_label,predicted_label,u_star,tag\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << samples[i].id << ',';
        if (samples[i].label > 0) out << samples[i].label;
        out << ',' << preds[i].label << ',' << format_double(preds[i].u_star) << ','
            << to_string(preds[i].tag) << '\n';
    }
}

} // namespace w2w
