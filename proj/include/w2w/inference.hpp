#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "w2w/model.hpp"
#include "w2w/uncertainty.hpp"

namespace w2w {

enum class ConfidenceTag { confident, not_confident };

std::string to_string(ConfidenceTag t);

// Label rule shared by every deterministic prediction: argmax with ties
// to the lowest index, 1-based.
int argmax_label(const ProbabilityVector& p);

struct Prediction {
    int label = 0; // argmax of class_probabilities, ties to the lowest index
    ConfidenceTag tag = ConfidenceTag::not_confident;
    double u_star = 0.0;
    ProbabilityVector class_probabilities; // deterministic classifier output
};

// Two-model protocol: the stochastic model's MC sweep yields u_star and
// the confidence gate (confident iff u_star <= u_th); the deterministic
// model alone decides the label. u_th must be >= 0.
Prediction infer(const ModelParameters& wise, const ModelParameters& wiped, double u_th,
                 const Tensor& x, const McConfig& mc_cfg);

// Stream plan for one identified sample: batch inference derives each
// sample's MC seed from (base_seed, id), so results are order- and
// batch-size-independent.
McConfig per_sample_mc(const McConfig& mc_cfg, std::int64_t id);

std::vector<Prediction> infer_batch(const ModelParameters& wise, const ModelParameters& wiped,
                                    double u_th, const std::vector<TrainSample>& samples,
                                    const McConfig& mc_cfg, int workers = 1);

// CSV rows: id,true_label,predicted_label,u_star,tag. A non-positive
// stored label means unknown and prints as an empty field.
void write_predictions(std::ostream& out, const std::vector<TrainSample>& samples,
                       const std::vector<Prediction>& preds);

} // namespace w2w
