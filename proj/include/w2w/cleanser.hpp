#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "w2w/kmeans.hpp"
#include "w2w/model.hpp"
#include "w2w/uncertainty.hpp"

namespace w2w {

// Stability-analysis knobs. Defaults are the published operating point:
// median window 11, std window 40 stride 1, threshold 0.01.
struct CleanseConfig {
    int filter_window = 11;
    int std_window = 40;
    int std_stride = 1;
    double std_threshold = 0.01;
};

// Per-epoch cluster-size-difference trace plus its two derived stages.
// filtered/std_series are recomputed from the full raw history each
// epoch, so rerunning the chain on `raw` reproduces them bit-exactly.
struct DeltaSignal {
    std::vector<double> raw;
    std::vector<double> filtered;
    std::vector<double> std_series;
};

enum class StopReason { stability, max_epochs };

std::string to_string(StopReason r);

struct CleansingOutcome {
    std::vector<std::uint8_t> spurious_mask; // aligned with the training data
    double u_threshold = 0.0;                // high-cluster centroid at the stop epoch
    int stop_epoch = 0;
    StopReason stopped_by = StopReason::max_epochs;
};

struct WiseEpochLog {
    int epoch = 0;
    double mean_loss = 0.0;
    double delta = 0.0;
    double filtered_delta = 0.0;
    bool have_std = false; // false until one full std window exists
    double latest_std = 0.0;
    std::size_t n_low = 0;
    std::size_t n_high = 0;
    double centroid_low = 0.0;
    double centroid_high = 0.0;
};

struct WiseResult {
    ModelParameters params;
    CleansingOutcome outcome;
    DeltaSignal signal;
    std::vector<WiseEpochLog> log;
    std::vector<double> final_uncertainties; // sweep values at the stop epoch
};

// Uncertainty source for one epoch; must return one value per training
// sample, in data order. Lets tests drive the stopping logic with
// synthetic uncertainty streams.
using UncertaintyProvider = std::function<std::vector<double>(int epoch, const ModelParameters&)>;

// Per epoch: one SGD pass, an uncertainty value for every training
// sample, 2-means split of those values, delta appended, filter + std
// chain recomputed, stop test. Requires max_epochs >= 40 so the stop
// rule can ever fire. Exhausting max_epochs is a normal outcome.
WiseResult run_wise(const std::vector<TrainSample>& data, const ArchSpec& arch,
                    const TrainingConfig& train_cfg, const McConfig& mc_cfg,
                    const CleanseConfig& cleanse_cfg = {}, int workers = 1);

WiseResult run_wise_with_provider(const std::vector<TrainSample>& data, const ArchSpec& arch,
                                  const TrainingConfig& train_cfg,
                                  const UncertaintyProvider& provider,
                                  const CleanseConfig& cleanse_cfg = {}, int workers = 1);

// One sweep: total uncertainty for every sample under the epoch's seeds.
std::vector<double> uncertainty_sweep(const ModelParameters& params,
                                      const std::vector<TrainSample>& data,
                                      const McConfig& mc_cfg, int epoch, int workers = 1);

// Plain-text outcome file: key/value manifest, then one spurious id per
// line after a "---" separator.
void write_outcome(std::ostream& out, const CleansingOutcome& outcome,
                   const std::vector<std::int64_t>& ids);

struct LoadedOutcome {
    double u_threshold = 0.0;
    int stop_epoch = 0;
    StopReason stopped_by = StopReason::max_epochs;
    std::size_t total = 0;
    std::vector<std::int64_t> spurious_ids;
};

LoadedOutcome read_outcome(std::istream& in);

// CSV: epoch,loss,delta,filtered,std,n_low,n_high,centroid_low,centroid_high
// with std empty until the first full window.
void write_wise_log(std::ostream& out, const std::vector<WiseEpochLog>& log);

} // namespace w2w
