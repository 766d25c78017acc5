#pragma once

#include "w2w/corpus.hpp"

namespace w2w {

// 2-D median filter per channel, square odd kernel, edge-replicated
// borders. ConfigError when the kernel is even or non-positive, or the
// image is smaller than the kernel in either dimension.
U8Image median_blur(const U8Image& img, int kernel);

// Bilinear resampling with half-pixel centers; border samples replicate
// edges, results round half-up to the u8 grid. Resizing to the input
// shape is the identity.
U8Image resize_bilinear(const U8Image& img, int out_h, int out_w);

// Sub-window [top, top+crop_h) x [left, left+crop_w) resized back to the
// input shape. ConfigError when the window leaves the image.
U8Image crop_and_resize(const U8Image& img, int top, int left, int crop_h, int crop_w);

// Shape-preserving rescale: factor < 1 shrinks then center-pads with
// edge replication, factor > 1 enlarges then center-crops. factor must
// be positive.
U8Image rescale_keep_shape(const U8Image& img, double factor);

} // namespace w2w
