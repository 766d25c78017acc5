#pragma once

#include <string>

#include "w2w/corpus.hpp"

namespace w2w {

// CIFAR-10 binary batch: 3073-byte records, each one label byte (0-9)
// followed by 3072 channel-planar bytes (1024 R, 1024 G, 1024 B) for a
// 32x32 image. Loading interleaves planes into H x W x 3 and maps label
// byte b to corpus label b+1 with class_count 10. DataError when the
// file size is not a multiple of 3073, the file is empty, or a label
// byte exceeds 9.
Corpus load_cifar_binary(const std::string& path);

// Inverse writer (labels stored as label-1, planes de-interleaved); a
// write/load cycle is pixel-exact.
void write_cifar_binary(const std::string& path, const Corpus& corpus);

} // namespace w2w
