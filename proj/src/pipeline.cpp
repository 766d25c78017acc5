#include "w2w/pipeline.hpp"

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "w2w/cifar.hpp"
#include "w2w/corruption.hpp"
#include "w2w/errors.hpp"
#include "w2w/format.hpp"
#include "w2w/idx.hpp"
#include "w2w/parallel.hpp"
#include "w2w/wiped.hpp"

namespace w2w {

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

// Presence enforced by require_with_flag; get_double then reports
// malformed text with the key name.
double required_double(const Config& cfg, const std::string& key, const std::string& flag) {
    require_with_flag(cfg, key, flag);
    return cfg.get_double(key, 0.0);
}

// Where artifacts land and how many threads ran shape no result, so the
// stored provenance drops them; reruns into any directory then produce
// byte-identical artifacts.
Config stored_config(const Config& cfg) {
    Config out;
    for (const auto& [key, value] : cfg.values())
        if (key != "out_dir" && key != "workers") out.set(key, value);
    return out;
}

std::vector<std::string> config_lines(const Config& cfg) {
    std::vector<std::string> lines;
    std::istringstream in(stored_config(cfg).serialize());
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// Dataset-path flags differ only by the alien- prefix.
std::string path_flag(const std::string& prefix, const std::string& name) {
    return prefix == "alien" ? "--alien-" + name : "--" + name;
}

std::vector<CorruptionKind> parse_degrade_kinds(const std::string& text) {
    std::vector<CorruptionKind> kinds;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        const std::size_t a = tok.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const std::size_t b = tok.find_last_not_of(" \t");
        tok = tok.substr(a, b - a + 1);
        try {
            kinds.push_back(parse_corruption_kind(tok));
        } catch (const DataError&) {
            throw ConfigError("corrupt.degrade_kinds: unknown kind '" + tok + "'");
        }
    }
    if (kinds.empty()) throw ConfigError("corrupt.degrade_kinds names no kinds");
    return kinds;
}

Corpus load_alien_pool(const Config& cfg, const Corpus& base, double fraction, std::uint64_t seed) {
    const std::string kind = require_with_flag(cfg, "alien.kind", "--alien-kind");
    if (kind == "synth_noise") {
        if (base.samples.empty()) throw DataError("cannot size an alien pool against an empty base corpus");
        const U8Image& first = base.samples[0].pixels;
        if (first.height != first.width)
            throw ConfigError("synth_noise alien pool needs square base images; base is " +
                              std::to_string(first.height) + "x" + std::to_string(first.width));
        const long long fallback = corruption_count(fraction, base.samples.size());
        const long long n = cfg.get_int("alien.count", fallback);
        return synth_structured_noise(static_cast<int>(n), first.height, first.channels, seed);
    }
    return load_dataset(cfg, "alien", seed);
}

TrainingConfig training_config(const Config& cfg, const std::string& prefix, std::uint64_t seed,
                               int default_epochs) {
    TrainingConfig t;
    t.learning_rate = cfg.get_double(prefix + ".learning_rate", 0.01);
    t.weight_decay = cfg.get_double(prefix + ".weight_decay", 0.001);
    t.batch_size = static_cast<int>(cfg.get_int(prefix + ".batch_size", 64));
    const std::string epochs_key = prefix == "wiped" ? ".epochs" : ".max_epochs";
    t.max_epochs = static_cast<int>(cfg.get_int(prefix + epochs_key, default_epochs));
    t.seed = seed;
    t.validate();
    return t;
}

CleanseConfig cleanse_config(const Config& cfg) {
    CleanseConfig c;
    c.filter_window = static_cast<int>(cfg.get_int("cleanse.filter_window", c.filter_window));
    c.std_window = static_cast<int>(cfg.get_int("cleanse.std_window", c.std_window));
    c.std_stride = static_cast<int>(cfg.get_int("cleanse.std_stride", c.std_stride));
    c.std_threshold = cfg.get_double("cleanse.std_threshold", c.std_threshold);
    return c;
}

ArchSpec arch_from_config(const Config& cfg, int class_count, Dims input) {
    const double dropout = cfg.get_double("dropout", 0.3);
    const std::string text = cfg.get("arch", "");
    if (text.empty()) {
        ArchSpec spec = default_arch(class_count, input);
        spec.dropout_rate = dropout;
        return spec;
    }
    return parse_arch(text, dropout, class_count, input);
}

Dims corpus_dims(const Corpus& corpus) {
    if (corpus.samples.empty()) throw DataError("dataset holds no samples");
    const U8Image& first = corpus.samples[0].pixels;
    return {first.height, first.width, first.channels};
}

void check_input_shape(const Corpus& corpus, const ArchSpec& arch, const std::string& role) {
    const Dims d = corpus_dims(corpus);
    if (d.h != arch.input.h || d.w != arch.input.w || d.c != arch.input.c)
        throw DataError(role + " images are " + std::to_string(d.h) + "x" + std::to_string(d.w) + "x" +
                        std::to_string(d.c) + " but the model expects " + std::to_string(arch.input.h) + "x" +
                        std::to_string(arch.input.w) + "x" + std::to_string(arch.input.c));
}

std::vector<std::uint8_t> truth_flags(const Corpus& corpus) {
    std::vector<std::uint8_t> truth;
    truth.reserve(corpus.samples.size());
    for (const auto& s : corpus.samples) truth.push_back(s.meta.is_spurious ? 1 : 0);
    return truth;
}

LoadedOutcome read_outcome_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    return read_outcome(in);
}

struct RunModels {
    TrainedModel wise;
    TrainedModel wiped;
    LoadedOutcome outcome;
};

RunModels load_run(const Config& cfg) {
    const std::filesystem::path run_dir = require_with_flag(cfg, "run_dir", "--run-dir");
    RunModels r;
    r.wise = load_checkpoint((run_dir / "wise.ckpt").string());
    r.wiped = load_checkpoint((run_dir / "wiped.ckpt").string());
    r.outcome = read_outcome_file(run_dir / "outcome.txt");
    return r;
}

double resolve_u_threshold(const Config& cfg, const LoadedOutcome& outcome) {
    if (cfg.has("infer.u_threshold")) {
        const double u = cfg.get_double("infer.u_threshold", 0.0);
        if (u < 0.0) throw ConfigError("infer.u_threshold must be >= 0");
        return u;
    }
    return outcome.u_threshold;
}

void write_reports(const std::filesystem::path& out, const std::string& stem, const AccuracyReport& r) {
    write_text_file(out / (stem + ".txt"), format_report(r));
    write_text_file(out / (stem + ".csv"), report_csv(r));
}

} // namespace

const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "arch",
        "dropout",
        "seed",
        "out_dir",
        "run_dir",
        "workers",
        "source.kind",
        "source.images",
        "source.labels",
        "source.path",
        "synth.classes",
        "synth.per_class",
        "synth.side",
        "synth.separation",
        "corrupt.kind",
        "corrupt.fraction",
        "corrupt.degrade_kinds",
        "alien.kind",
        "alien.images",
        "alien.labels",
        "alien.path",
        "alien.count",
        "data.kind",
        "data.images",
        "data.labels",
        "data.path",
        "test.kind",
        "test.images",
        "test.labels",
        "test.path",
        "wise.learning_rate",
        "wise.weight_decay",
        "wise.batch_size",
        "wise.max_epochs",
        "wise.mc_passes",
        "cleanse.filter_window",
        "cleanse.std_window",
        "cleanse.std_stride",
        "cleanse.std_threshold",
        "wiped.learning_rate",
        "wiped.weight_decay",
        "wiped.batch_size",
        "wiped.epochs",
        "infer.mc_passes",
        "infer.u_threshold",
        "infer.image",
        "infer.index",
    };
    return keys;
}

std::string require_with_flag(const Config& cfg, const std::string& key, const std::string& flag) {
    if (!cfg.has(key)) throw ConfigError("missing config key '" + key + "' (flag " + flag + ")");
    return cfg.require(key);
}

Corpus load_dataset(const Config& cfg, const std::string& prefix, std::uint64_t seed) {
    const std::string kind = require_with_flag(cfg, prefix + ".kind", "--" + prefix + "-kind");
    if (kind == "idx") {
        const std::string images = require_with_flag(cfg, prefix + ".images", path_flag(prefix, "images"));
        const std::string labels = require_with_flag(cfg, prefix + ".labels", path_flag(prefix, "labels"));
        return load_idx(images, labels);
    }
    if (kind == "cifar") {
        const std::string path = require_with_flag(cfg, prefix + ".path", path_flag(prefix, "data"));
        return load_cifar_binary(path);
    }
    if (kind == "corpus") {
        const std::string path = require_with_flag(cfg, prefix + ".path", path_flag(prefix, "data"));
        return read_corpus_dir(path);
    }
    if (kind == "synth") {
        const int classes = static_cast<int>(cfg.get_int("synth.classes", 4));
        const int per_class = static_cast<int>(cfg.get_int("synth.per_class", 125));
        const int side = static_cast<int>(cfg.get_int("synth.side", 16));
        const double separation = cfg.get_double("synth.separation", 4.0);
        return synth_gaussians(per_class, classes, side, separation, seed);
    }
    throw ConfigError(prefix + ".kind: unknown dataset kind '" + kind + "'");
}

Corpus cmd_corrupt(const Config& cfg, const std::string& out_dir) {
    cfg.check_known(known_config_keys());
    const std::uint64_t seed = cfg.get_seed("seed", 0);
    const Corpus base = load_dataset(cfg, "source", seed);

    const std::string kind = cfg.get("corrupt.kind", "none");
    Corpus result;
    if (kind == "none") {
        result = base;
    } else {
        const double fraction = required_double(cfg, "corrupt.fraction", "--fraction");
        if (!(fraction > 0.0 && fraction < 1.0))
            throw ConfigError("corrupt.fraction must lie strictly inside (0, 1); got " + format_double(fraction));
        if (kind == "alien") {
            const Corpus pool = load_alien_pool(cfg, base, fraction, seed);
            result = inject_alien(base, pool, fraction, seed);
        } else if (kind == "sym_flip") {
            result = flip_symmetric(base, fraction, seed);
        } else if (kind == "pair_flip") {
            result = flip_pair(base, fraction, seed);
        } else if (kind == "degrade") {
            const std::vector<CorruptionKind> kinds =
                parse_degrade_kinds(cfg.get("corrupt.degrade_kinds", "blur,crop,scale"));
            result = degrade(base, fraction, kinds, seed);
        } else {
            throw ConfigError("corrupt.kind: unknown corruption '" + kind + "'");
        }
    }

    write_corpus_dir(out_dir, result, config_lines(cfg));
    write_text_file(std::filesystem::path(out_dir) / "config.txt", stored_config(cfg).serialize());
    return result;
}

TrainArtifacts cmd_train(const Config& cfg, const std::string& out_dir, int workers) {
    cfg.check_known(known_config_keys());
    const std::uint64_t seed = cfg.get_seed("seed", 0);

    Corpus corpus = load_dataset(cfg, "data", seed);
    corpus.validate();
    const DatasetStats stats = compute_stats(corpus);
    const std::vector<TrainSample> data = prepare_training_data(corpus, stats);
    const ArchSpec arch = arch_from_config(cfg, corpus.class_count, corpus_dims(corpus));

    TrainingConfig wise_cfg = training_config(cfg, "wise", seed, 300);
    if (wise_cfg.max_epochs < 40)
        throw ConfigError("wise.max_epochs " + std::to_string(wise_cfg.max_epochs) +
                          " is below the 40-epoch minimum the stability window needs");
    McConfig mc;
    mc.passes = static_cast<int>(cfg.get_int("wise.mc_passes", 100));
    mc.base_seed = seed;
    mc.validate();
    const CleanseConfig cleanse = cleanse_config(cfg);

    const WiseResult wise = run_wise(data, arch, wise_cfg, mc, cleanse, workers);

    std::size_t kept = 0;
    for (std::uint8_t m : wise.outcome.spurious_mask) kept += m ? 0 : 1;
    TrainingConfig wiped_cfg = training_config(cfg, "wiped", seed, 100);
    wiped_cfg.batch_size = std::min(wiped_cfg.batch_size, static_cast<int>(std::max<std::size_t>(kept, 1)));
    const ModelParameters wiped = train_wiped(data, wise.outcome.spurious_mask, arch, wiped_cfg, workers);

    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    save_checkpoint((out / "wise.ckpt").string(), {wise.params, stats});
    save_checkpoint((out / "wiped.ckpt").string(), {wiped, stats});

    std::vector<std::int64_t> ids;
    ids.reserve(data.size());
    for (const auto& s : data) ids.push_back(s.id);
    std::ostringstream outcome_text;
    write_outcome(outcome_text, wise.outcome, ids);
    write_text_file(out / "outcome.txt", outcome_text.str());

    std::ostringstream log_text;
    write_wise_log(log_text, wise.log);
    write_text_file(out / "wise_log.csv", log_text.str());

    TrainArtifacts artifacts;
    artifacts.outcome = wise.outcome;
    artifacts.train_metrics = cleansing_metrics(wise.outcome.spurious_mask, truth_flags(corpus));
    artifacts.final_loss = wise.log.empty() ? 0.0 : wise.log.back().mean_loss;
    write_text_file(out / "cleansing_metrics.txt", format_metrics(artifacts.train_metrics));
    write_text_file(out / "config.txt", stored_config(cfg).serialize());
    return artifacts;
}

EvaluateArtifacts cmd_evaluate(const Config& cfg, const std::string& out_dir, int workers) {
    cfg.check_known(known_config_keys());
    const std::uint64_t seed = cfg.get_seed("seed", 0);
    const RunModels run = load_run(cfg);
    const double u_th = resolve_u_threshold(cfg, run.outcome);

    Corpus test = load_dataset(cfg, "test", seed);
    test.validate();
    check_input_shape(test, run.wise.params.arch, "test");
    const std::vector<TrainSample> samples = prepare_training_data(test, run.wise.stats);

    McConfig mc;
    mc.passes = static_cast<int>(cfg.get_int("infer.mc_passes", 100));
    mc.base_seed = seed;
    mc.validate();
    const std::vector<Prediction> preds =
        infer_batch(run.wise.params, run.wiped.params, u_th, samples, mc, workers);

    std::vector<int> predicted;
    std::vector<int> truth;
    std::vector<ConfidenceTag> tags;
    predicted.reserve(preds.size());
    truth.reserve(preds.size());
    tags.reserve(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        predicted.push_back(preds[i].label);
        truth.push_back(samples[i].label);
        tags.push_back(preds[i].tag);
    }
    const int C = run.wiped.params.arch.class_count;

    EvaluateArtifacts artifacts;
    artifacts.all = accuracy_report(predicted, truth, {}, C, AccuracyVariant::all_samples);
    artifacts.confident = accuracy_report(predicted, truth, tags, C, AccuracyVariant::confident_only);
    artifacts.u_threshold = u_th;

    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    std::ostringstream pred_text;
    write_predictions(pred_text, samples, preds);
    write_text_file(out / "predictions.csv", pred_text.str());
    write_reports(out, "report_all", artifacts.all);
    write_reports(out, "report_confident", artifacts.confident);
    write_text_file(out / "config.txt", stored_config(cfg).serialize());
    return artifacts;
}

Prediction cmd_infer(const Config& cfg) {
    cfg.check_known(known_config_keys());
    const std::uint64_t seed = cfg.get_seed("seed", 0);
    const RunModels run = load_run(cfg);
    const double u_th = resolve_u_threshold(cfg, run.outcome);

    const std::string image_path = require_with_flag(cfg, "infer.image", "--image");
    const std::vector<U8Image> images = load_idx_images(image_path);
    const long long index = cfg.get_int("infer.index", 0);
    if (index < 0 || index >= static_cast<long long>(images.size()))
        throw DataError("image index " + std::to_string(index) + " out of range [0, " +
                        std::to_string(images.size()) + ")");
    const U8Image& img = images[static_cast<std::size_t>(index)];
    const ArchSpec& arch = run.wise.params.arch;
    if (img.height != arch.input.h || img.width != arch.input.w || img.channels != arch.input.c)
        throw DataError("image is " + std::to_string(img.height) + "x" + std::to_string(img.width) + "x" +
                        std::to_string(img.channels) + " but the model expects " + std::to_string(arch.input.h) +
                        "x" + std::to_string(arch.input.w) + "x" + std::to_string(arch.input.c));

    McConfig mc;
    mc.passes = static_cast<int>(cfg.get_int("infer.mc_passes", 100));
    mc.base_seed = seed;
    mc.validate();
    return infer(run.wise.params, run.wiped.params, u_th, preprocess(img, run.wise.stats), mc);
}

BaselineComparison compare_baseline(const Corpus& train, const Corpus& test,
                                    const ExperimentConfig& cfg) {
    const DatasetStats stats = compute_stats(train);
    const std::vector<TrainSample> data = prepare_training_data(train, stats);
    const std::vector<TrainSample> test_samples = prepare_training_data(test, stats);
    const int C = cfg.arch.class_count;

    const WiseResult wise = run_wise(data, cfg.arch, cfg.wise, cfg.mc, cfg.cleanse, cfg.workers);

    std::size_t kept = 0;
    for (std::uint8_t m : wise.outcome.spurious_mask) kept += m ? 0 : 1;
    TrainingConfig wiped_cfg = cfg.wiped;
    wiped_cfg.batch_size = std::min(wiped_cfg.batch_size, static_cast<int>(std::max<std::size_t>(kept, 1)));
    const ModelParameters wiped = train_wiped(data, wise.outcome.spurious_mask, cfg.arch, wiped_cfg, cfg.workers);

    TrainingConfig base_cfg = cfg.wiped;
    base_cfg.batch_size = std::min(base_cfg.batch_size, static_cast<int>(std::max<std::size_t>(data.size(), 1)));
    const std::vector<std::uint8_t> keep_all(data.size(), 0);
    const ModelParameters baseline = train_wiped(data, keep_all, cfg.arch, base_cfg, cfg.workers);

    const std::vector<Prediction> preds =
        infer_batch(wise.params, wiped, wise.outcome.u_threshold, test_samples, cfg.mc, cfg.workers);

    std::vector<int> w2w_labels;
    std::vector<int> truth;
    std::vector<ConfidenceTag> tags;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        w2w_labels.push_back(preds[i].label);
        truth.push_back(test_samples[i].label);
        tags.push_back(preds[i].tag);
    }

    std::vector<int> base_labels(test_samples.size(), 0);
    parallel_for(test_samples.size(), cfg.workers, [&](std::size_t i) {
        base_labels[i] = argmax_label(forward(baseline, test_samples[i].x));
    });

    BaselineComparison cmp;
    cmp.outcome = wise.outcome;
    cmp.train_metrics = cleansing_metrics(wise.outcome.spurious_mask, truth_flags(train));
    cmp.w2w_all = accuracy_report(w2w_labels, truth, {}, C, AccuracyVariant::all_samples);
    cmp.w2w_confident = accuracy_report(w2w_labels, truth, tags, C, AccuracyVariant::confident_only);
    cmp.baseline_all = accuracy_report(base_labels, truth, {}, C, AccuracyVariant::all_samples);
    cmp.mean_delta = cmp.w2w_all.mean - cmp.baseline_all.mean;
    return cmp;
}

} // namespace w2w
