#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2w/checkpoint.hpp"
#include "w2w/cleanser.hpp"
#include "w2w/config.hpp"
#include "w2w/corpus.hpp"
#include "w2w/evaluation.hpp"
#include "w2w/inference.hpp"

namespace w2w {

// Union of every key any command reads; check_known rejects the rest so
// one config file can drive corrupt, train, evaluate, and infer.
const std::vector<std::string>& known_config_keys();

// require() whose ConfigError also names the CLI flag that fills the key.
std::string require_with_flag(const Config& cfg, const std::string& key, const std::string& flag);

// Loads the dataset described by `<prefix>.kind`: idx (images+labels),
// cifar (single binary), corpus (directory), or synth (Gaussian blobs
// from the synth.* keys). `seed` feeds the synthetic generator only.
Corpus load_dataset(const Config& cfg, const std::string& prefix, std::uint64_t seed);

// Applies corrupt.kind (none | alien | sym_flip | pair_flip | degrade) to
// the source dataset and writes the corpus + manifest + config copy into
// out_dir. Fractions here must lie strictly inside (0, 1); the alien pool
// comes from the alien.* keys (kind synth_noise generates one matching
// the base shape). Returns the written corpus.
Corpus cmd_corrupt(const Config& cfg, const std::string& out_dir);

struct TrainArtifacts {
    CleansingOutcome outcome;
    CleansingMetrics train_metrics; // flagged mask vs the corpus's is_spurious flags
    double final_loss = 0.0;        // last stochastic-stage epoch mean loss
};

// Full training pipeline on the data.* dataset: stochastic stage with the
// stability stop, then the deterministic stage on the kept subset. Writes
// wise.ckpt, wiped.ckpt, outcome.txt, wise_log.csv, cleansing_metrics.txt,
// and config.txt into out_dir. Refuses wise.max_epochs < 40 (the stability
// window cannot fire earlier). The deterministic stage's batch size is
// clamped to the kept-subset size.
TrainArtifacts cmd_train(const Config& cfg, const std::string& out_dir, int workers);

struct EvaluateArtifacts {
    AccuracyReport all;
    AccuracyReport confident;
    double u_threshold = 0.0; // the value actually applied
};

// Scores the test.* dataset with the checkpoints in run_dir. The
// confidence threshold comes from infer.u_threshold when set, otherwise
// from the stored outcome. Writes predictions.csv, report_all.txt/.csv,
// report_confident.txt/.csv, and config.txt into out_dir.
EvaluateArtifacts cmd_evaluate(const Config& cfg, const std::string& out_dir, int workers);

// Single-sample inference: image infer.index from the IDX file
// infer.image, scored with the run_dir checkpoints. Threshold precedence
// as in cmd_evaluate. The image shape must match the model input.
Prediction cmd_infer(const Config& cfg);

// One experiment arm pair sharing arch, seeds, and budgets.
struct ExperimentConfig {
    ArchSpec arch;
    TrainingConfig wise;
    McConfig mc;
    CleanseConfig cleanse;
    TrainingConfig wiped;
    int workers = 1;
};

struct BaselineComparison {
    CleansingOutcome outcome;
    CleansingMetrics train_metrics;
    AccuracyReport w2w_all;       // two-model pipeline, every test sample
    AccuracyReport w2w_confident; // two-model pipeline, confident subset
    AccuracyReport baseline_all;  // uncleansed single model, every test sample
    double mean_delta = 0.0;      // w2w_all.mean - baseline_all.mean
};

// Trains both arms on `train` and scores both on `test`: the full
// pipeline against the same architecture trained on the uncleansed
// corpus with dropout as plain regularization and deterministic
// inference. Both arms share cfg.wiped's budget and seed.
BaselineComparison compare_baseline(const Corpus& train, const Corpus& test,
                                    const ExperimentConfig& cfg);

} // namespace w2w
