#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "w2w/model.hpp"
#include "w2w/tensor.hpp"

namespace w2w {

// Monte Carlo dropout sampling plan. `passes` is the T of the variance
// decomposition; at least 2 draws are needed for a variance.
struct McConfig {
    int passes = 100;
    std::uint64_t base_seed = 0;

    void validate() const;
};

// T stochastic forward outputs for one input, ordered by pass index.
struct McSample {
    std::vector<ProbabilityVector> passes;
};

// Per-sample predictive variance split into its two sources. Matrices are
// C x C, symmetric, with non-negative diagonals; total is the trace of
// their sum.
struct UncertaintyRecord {
    Tensor aleatoric;
    Tensor epistemic;
    double total = 0.0;
};

// Runs cfg.passes dropout-on forwards. Pass t draws its mask stream from
// (base_seed, t) alone, so passes can run in any order and a given pass
// index always sees the same masks.
McSample mc_predict(const ModelParameters& params, const Tensor& x, const McConfig& cfg);
McSample mc_predict(Evaluator& eval, const Tensor& x, const McConfig& cfg);

// aleatoric = (1/T) sum_t [diag(p_t) - p_t p_t^T]
// epistemic = (1/T) sum_t (p_t - mean)(p_t - mean)^T
UncertaintyRecord decompose(const McSample& s);

double total_uncertainty(const UncertaintyRecord& r);

// One row per sample: id,aleatoric,epistemic,total (traces), with header.
// Doubles are printed round-trip exact.
void write_uncertainty_rows(std::ostream& out, const std::vector<std::int64_t>& ids,
                            const std::vector<UncertaintyRecord>& records);

} // namespace w2w
