#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2w/model.hpp"
#include "w2w/tensor.hpp"

namespace w2w {

enum class CorruptionKind { none, alien, sym_flip, pair_flip, blur, crop, scale };

const char* to_string(CorruptionKind k);
CorruptionKind parse_corruption_kind(const std::string& s); // DataError on unknown names

// Raw 8-bit image, row-major, channel-interleaved.
struct U8Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;

    U8Image() = default;
    U8Image(int h, int w, int c)
        : height(h), width(w), channels(c),
          pixels(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * static_cast<std::size_t>(c), 0) {}

    std::size_t size() const { return pixels.size(); }

    std::uint8_t at(int y, int x, int c) const {
        return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                          static_cast<std::size_t>(channels) +
                      static_cast<std::size_t>(c)];
    }
    std::uint8_t& at(int y, int x, int c) {
        return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                          static_cast<std::size_t>(channels) +
                      static_cast<std::size_t>(c)];
    }
};

bool same_shape(const U8Image& a, const U8Image& b);

// original_label == 0 means "not recorded" (labels are 1-based).
struct SampleMeta {
    bool is_spurious = false;
    CorruptionKind kind = CorruptionKind::none;
    int original_label = 0;
};

struct CorpusSample {
    std::int64_t id = 0;
    U8Image pixels;
    int label = 0; // 1-based, in [1, class_count]
    SampleMeta meta;
};

struct Corpus {
    int class_count = 0;
    std::vector<CorpusSample> samples;

    std::size_t size() const { return samples.size(); }
    std::int64_t max_id() const; // -1 when empty

    // DataError on duplicate ids, labels outside [1, class_count], shape
    // drift between samples, or is_spurious disagreeing with kind.
    void validate() const;

    std::size_t spurious_count() const;
};

// Per-channel mean of pixel/255 values over the whole corpus; subtracted
// during preprocessing and carried inside checkpoints so inference sees
// the same input distribution as training.
struct DatasetStats {
    std::vector<double> channel_mean;
};

DatasetStats compute_stats(const Corpus& corpus); // DataError on empty
Tensor to_unit_tensor(const U8Image& img);        // u8 -> [0, 1]
Tensor preprocess(const U8Image& img, const DatasetStats& stats);
std::vector<TrainSample> prepare_training_data(const Corpus& corpus, const DatasetStats& stats);

// On-disk layout under dir/:
//   manifest.txt  counts, class count, shape, spurious tally, provenance
//   samples.csv   id,label,is_spurious,kind,original_label
//   pixels.u8     raw pixel bytes, samples concatenated in order
// Writes are byte-deterministic for a given corpus + provenance.
void write_corpus_dir(const std::string& dir, const Corpus& corpus,
                      const std::vector<std::string>& provenance);
Corpus read_corpus_dir(const std::string& dir);
std::string read_manifest(const std::string& dir);

} // namespace w2w
