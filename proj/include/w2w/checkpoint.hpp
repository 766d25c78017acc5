#pragma once

#include <string>

#include "w2w/corpus.hpp"
#include "w2w/model.hpp"

namespace w2w {

// A deployable classifier: parameters plus the preprocessing statistics
// its training inputs were centered with.
struct TrainedModel {
    ModelParameters params;
    DatasetStats stats;
};

// Text manifest (arch line, dropout, class count, input dims, channel
// means, value count), a "---" separator, then all parameter values as
// little-endian float32 in layer order (weights then bias per layer).
// Parameters live on the float32 grid, so save/load is value-exact.
void save_checkpoint(const std::string& path, const TrainedModel& model);
TrainedModel load_checkpoint(const std::string& path); // DataError on malformed/truncated files

} // namespace w2w
