#pragma once

#include <cstdint>
#include <vector>

#include "w2w/corpus.hpp"

namespace w2w {

// Count of samples selected for corruption: round-half-up of
// fraction * n. Every op below flags exactly this many samples.
std::int64_t corruption_count(double fraction, std::size_t n);

// Gaussian blob per class at a class-specific position on a circle of
// radius `separation` around the image center, with per-sample center
// jitter and pixel noise. Labels follow construction; ids run 0..N-1 in
// class-major order. Deterministic in (arguments, seed).
Corpus synth_gaussians(int n_per_class, int class_count, int image_side, double separation, std::uint64_t seed);

// Sinusoidal-grating images (random orientation, frequency, phase,
// amplitude, plus pixel noise): structured content with no class
// semantics, intended as an alien pool. All labels 1, class_count 1.
Corpus synth_structured_noise(int n, int image_side, int channels, std::uint64_t seed);

// Appends round-half-up(fraction * |base|) samples drawn without
// replacement from alien_pool, each relabelled uniformly in
// [1, base.class_count] and marked kind=alien. Appended ids continue
// from max(base ids) + 1, so they never collide. Base samples are
// copied bit-identically. DataError when the pool is too small or its
// image shape differs from the base.
Corpus inject_alien(const Corpus& base, const Corpus& alien_pool, double fraction, std::uint64_t seed);

// Relabels a round-half-up fraction of samples to a uniformly random
// *different* class; kind=sym_flip, original_label recorded. C >= 2.
Corpus flip_symmetric(const Corpus& corpus, double fraction, std::uint64_t seed);

// Relabels selected samples to the successor class, wrapping C -> 1;
// kind=pair_flip, original_label recorded. C >= 2.
Corpus flip_pair(const Corpus& corpus, double fraction, std::uint64_t seed);

// Pixel degradation with labels kept: selected samples (ascending id
// order) receive kinds round-robin from `kinds`. blur = 11x11 median
// filter; crop = random sub-window with side fraction in [0.5, 0.9]
// resized back; scale = random factor in [0.5, 1.5], shrink+pad or
// enlarge+crop. ConfigError when kinds is empty, repeats an entry,
// names a non-degradation kind, or blur is requested on images smaller
// than 11x11.
Corpus degrade(const Corpus& corpus, double fraction, const std::vector<CorruptionKind>& kinds, std::uint64_t seed);

} // namespace w2w
