#include "w2w/wiped.hpp"

#include <string>

#include "w2w/errors.hpp"
#include "w2w/rng.hpp"

namespace w2w {

namespace {
constexpr std::uint64_t kWipedEpochTag = 0x57495045ull; // "WIPE"
}

ModelParameters train_wiped(const std::vector<TrainSample>& data,
                            const std::vector<std::uint8_t>& spurious_mask, const ArchSpec& arch,
                            const TrainingConfig& cfg, int workers) {
    if (spurious_mask.size() != data.size())
        throw DataError("train_wiped: mask of " + std::to_string(spurious_mask.size()) +
                        " entries for " + std::to_string(data.size()) + " samples");
    cfg.validate();
    arch.validate();

    std::vector<TrainSample> kept;
    kept.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!spurious_mask[i]) kept.push_back(data[i]);

    std::vector<std::size_t> per_class(static_cast<std::size_t>(arch.class_count), 0);
    for (const TrainSample& s : kept) {
        if (s.label < 1 || s.label > arch.class_count)
            throw DataError("train_wiped: label " + std::to_string(s.label) + " outside [1, " +
                            std::to_string(arch.class_count) + "]");
        ++per_class[static_cast<std::size_t>(s.label - 1)];
    }
    for (int c = 1; c <= arch.class_count; ++c)
        if (per_class[static_cast<std::size_t>(c - 1)] == 0)
            throw DataError("train_wiped: class " + std::to_string(c) +
                            " has no samples after cleansing");

    ModelParameters params = init_model(arch, cfg.seed);
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const std::uint64_t epoch_seed =
            mix_seed(cfg.seed, {kWipedEpochTag, static_cast<std::uint64_t>(epoch)});
        sgd_epoch(params, kept, cfg, epoch_seed, workers);
    }
    return params;
}

} // namespace w2w
