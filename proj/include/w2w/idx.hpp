#pragma once

#include <string>
#include <vector>

#include "w2w/corpus.hpp"

namespace w2w {

// Big-endian IDX container pair (MNIST family). Images file: magic
// 0x00000803, then count/rows/cols, then raw bytes; labels file: magic
// 0x00000801, then count, then one byte per label. Raw label byte b maps
// to corpus label b+1 (corpus labels are 1-based); class_count becomes
// the largest mapped label. Malformed input raises DataError naming the
// failure class (wrong magic, truncated file, count mismatch) and the
// byte offset involved.
Corpus load_idx(const std::string& images_path, const std::string& labels_path);

// Images container alone (for inference inputs with no labels file).
std::vector<U8Image> load_idx_images(const std::string& images_path);

// Writers for the same two containers; labels are corpus labels, stored
// as label-1. A write/load cycle is pixel- and label-exact.
void write_idx_images(const std::string& path, const std::vector<U8Image>& images);
void write_idx_labels(const std::string& path, const std::vector<int>& labels);

} // namespace w2w
