#pragma once

#include <cstdint>
#include <vector>

#include "w2w/model.hpp"

namespace w2w {

// Trains the deterministic classifier on the unmasked subset for exactly
// cfg.max_epochs epochs (no early stopping; 100 is the conventional
// budget). Dropout acts as ordinary training regularization; inference
// on the result is always dropout-off. Every class in [1, arch.class_count]
// must keep at least one unmasked sample, otherwise DataError naming the
// first emptied class.
ModelParameters train_wiped(const std::vector<TrainSample>& data,
                            const std::vector<std::uint8_t>& spurious_mask, const ArchSpec& arch,
                            const TrainingConfig& cfg, int workers = 1);

} // namespace w2w
