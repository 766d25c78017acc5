#include <iostream>
#include <list>
#include <string>

#include "CLI11.hpp"
#include "w2w/config.hpp"
#include "w2w/errors.hpp"
#include "w2w/format.hpp"
#include "w2w/parallel.hpp"
#include "w2w/pipeline.hpp"

namespace {

using w2w::Config;

// Binds CLI flags to config keys; only flags the user actually passed
// override the file values. std::list keeps the bound strings stable.
class KeyedFlags {
public:
    explicit KeyedFlags(CLI::App* cmd) : cmd_(cmd) {}

    void option(const std::string& flag, const std::string& key, const std::string& help) {
        entries_.emplace_back();
        Entry& e = entries_.back();
        e.key = key;
        e.opt = cmd_->add_option(flag, e.value, help);
    }

    void apply(Config& cfg) const {
        for (const Entry& e : entries_)
            if (e.opt->count() > 0) cfg.set(e.key, e.value);
    }

private:
    struct Entry {
        std::string key;
        std::string value;
        CLI::Option* opt = nullptr;
    };

    CLI::App* cmd_;
    std::list<Entry> entries_;
};

struct Command {
    CLI::App* app = nullptr;
    std::string config_path;
    KeyedFlags flags;

    explicit Command(CLI::App* a) : app(a), flags(a) {
        app->add_option("--config", config_path, "config file (flags override its values)");
        flags.option("--seed", "seed", "master seed");
    }

    Config build() const {
        Config cfg = config_path.empty() ? Config() : Config::from_file(config_path);
        flags.apply(cfg);
        return cfg;
    }
};

void add_run_flags(Command& c) {
    c.flags.option("--out-dir", "out_dir", "artifact output directory");
    c.flags.option("--workers", "workers", "thread budget for all internal parallelism");
}

int resolve_workers(const Config& cfg) {
    const long long w = cfg.get_int("workers", w2w::default_workers());
    if (w < 1) throw w2w::ConfigError("workers must be >= 1");
    return static_cast<int>(w);
}

std::string resolve_out_dir(const Config& cfg) {
    return w2w::require_with_flag(cfg, "out_dir", "--out-dir");
}

int run_corrupt(const Command& c) {
    Config cfg = c.build();
    const std::string out = resolve_out_dir(cfg);
    const w2w::Corpus corpus = w2w::cmd_corrupt(cfg, out);
    std::cout << "wrote " << corpus.samples.size() << " samples (" << corpus.spurious_count()
              << " spurious) to " << out << "\n";
    return w2w::exit_code::ok;
}

int run_train(const Command& c) {
    Config cfg = c.build();
    const std::string out = resolve_out_dir(cfg);
    const w2w::TrainArtifacts a = w2w::cmd_train(cfg, out, resolve_workers(cfg));
    std::size_t flagged = 0;
    for (std::uint8_t m : a.outcome.spurious_mask) flagged += m ? 1 : 0;
    std::cout << "stopped at epoch " << a.outcome.stop_epoch << " (" << to_string(a.outcome.stopped_by)
              << "), flagged " << flagged << "/" << a.outcome.spurious_mask.size()
              << " samples, u_threshold " << w2w::format_double(a.outcome.u_threshold) << "\n";
    std::cout << "artifacts in " << out << "\n";
    return w2w::exit_code::ok;
}

int run_evaluate(const Command& c) {
    Config cfg = c.build();
    const std::string out = resolve_out_dir(cfg);
    const w2w::EvaluateArtifacts a = w2w::cmd_evaluate(cfg, out, resolve_workers(cfg));
    std::cout << "mean accuracy (all samples) " << w2w::format_double(a.all.mean) << "\n";
    std::cout << "mean accuracy (confident only) " << w2w::format_double(a.confident.mean) << "\n";
    std::cout << "u_threshold " << w2w::format_double(a.u_threshold) << "\n";
    std::cout << "reports in " << out << "\n";
    return w2w::exit_code::ok;
}

int run_infer(const Command& c) {
    Config cfg = c.build();
    const w2w::Prediction p = w2w::cmd_infer(cfg);
    std::cout << "label=" << p.label << " tag=" << to_string(p.tag) << " u_star="
              << w2w::format_double(p.u_star) << "\n";
    return w2w::exit_code::ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-model pipeline for training on corrupted image corpora"};
    app.require_subcommand(1);

    CLI::App* corrupt = app.add_subcommand("corrupt", "build a corrupted corpus from a source dataset");
    Command corrupt_cmd(corrupt);
    add_run_flags(corrupt_cmd);
    corrupt_cmd.flags.option("--source-kind", "source.kind", "idx | cifar | corpus | synth");
    corrupt_cmd.flags.option("--images", "source.images", "source IDX image file");
    corrupt_cmd.flags.option("--labels", "source.labels", "source IDX label file");
    corrupt_cmd.flags.option("--data", "source.path", "source CIFAR binary or corpus directory");
    corrupt_cmd.flags.option("--kind", "corrupt.kind", "none | alien | sym_flip | pair_flip | degrade");
    corrupt_cmd.flags.option("--fraction", "corrupt.fraction", "corrupted fraction, strictly inside (0, 1)");
    corrupt_cmd.flags.option("--alien-kind", "alien.kind", "alien pool source kind (or synth_noise)");
    corrupt_cmd.flags.option("--alien-images", "alien.images", "alien pool IDX image file");
    corrupt_cmd.flags.option("--alien-labels", "alien.labels", "alien pool IDX label file");
    corrupt_cmd.flags.option("--alien-data", "alien.path", "alien pool CIFAR binary or corpus directory");

    CLI::App* train = app.add_subcommand("train", "run the two-stage training pipeline");
    Command train_cmd(train);
    add_run_flags(train_cmd);
    train_cmd.flags.option("--data-kind", "data.kind", "idx | cifar | corpus | synth");
    train_cmd.flags.option("--images", "data.images", "training IDX image file");
    train_cmd.flags.option("--labels", "data.labels", "training IDX label file");
    train_cmd.flags.option("--data", "data.path", "training CIFAR binary or corpus directory");
    train_cmd.flags.option("--max-epochs", "wise.max_epochs", "stochastic-stage epoch budget (>= 40)");
    train_cmd.flags.option("--mc-passes", "wise.mc_passes", "Monte Carlo passes per uncertainty sweep");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a test dataset with a trained run");
    Command evaluate_cmd(evaluate);
    add_run_flags(evaluate_cmd);
    evaluate_cmd.flags.option("--run-dir", "run_dir", "directory holding the training artifacts");
    evaluate_cmd.flags.option("--test-kind", "test.kind", "idx | cifar | corpus | synth");
    evaluate_cmd.flags.option("--images", "test.images", "test IDX image file");
    evaluate_cmd.flags.option("--labels", "test.labels", "test IDX label file");
    evaluate_cmd.flags.option("--data", "test.path", "test CIFAR binary or corpus directory");
    evaluate_cmd.flags.option("--mc-passes", "infer.mc_passes", "Monte Carlo passes per sample");
    evaluate_cmd.flags.option("--u-threshold", "infer.u_threshold", "override the stored confidence threshold");

    CLI::App* infer = app.add_subcommand("infer", "classify one image from an IDX file");
    Command infer_cmd(infer);
    infer_cmd.flags.option("--run-dir", "run_dir", "directory holding the training artifacts");
    infer_cmd.flags.option("--image", "infer.image", "IDX image file");
    infer_cmd.flags.option("--index", "infer.index", "image index inside the file (default 0)");
    infer_cmd.flags.option("--mc-passes", "infer.mc_passes", "Monte Carlo passes");
    infer_cmd.flags.option("--u-threshold", "infer.u_threshold", "override the stored confidence threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? w2w::exit_code::ok : w2w::exit_code::config;
    }

    try {
        if (app.got_subcommand(corrupt)) return run_corrupt(corrupt_cmd);
        if (app.got_subcommand(train)) return run_train(train_cmd);
        if (app.got_subcommand(evaluate)) return run_evaluate(evaluate_cmd);
        return run_infer(infer_cmd);
    } catch (const w2w::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return w2w::exit_code::config;
    } catch (const w2w::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return w2w::exit_code::data_format;
    } catch (const w2w::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return w2w::exit_code::numeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return w2w::exit_code::generic;
    }
}
