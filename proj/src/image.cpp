#include "w2w/image.hpp"

#include <algorithm>
#include <cmath>

#include "w2w/errors.hpp"

namespace w2w {

namespace {

int clamp_index(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

std::uint8_t round_to_u8(double v) {
    double r = std::floor(v + 0.5);
    if (r < 0.0) return 0;
    if (r > 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

int round_dim(double v) { return static_cast<int>(std::floor(v + 0.5)); }

void check_image(const U8Image& img) {
    if (img.height < 1 || img.width < 1 || img.channels < 1)
        throw DataError("image has empty dimensions");
    if (img.pixels.size() != static_cast<std::size_t>(img.height) * static_cast<std::size_t>(img.width) *
                                 static_cast<std::size_t>(img.channels))
        throw DataError("image pixel buffer size mismatch");
}

} // namespace

U8Image median_blur(const U8Image& img, int kernel) {
    check_image(img);
    if (kernel < 1 || kernel % 2 == 0)
        throw ConfigError("median blur kernel must be odd and positive, got " + std::to_string(kernel));
    if (img.height < kernel || img.width < kernel)
        throw ConfigError("image " + std::to_string(img.height) + "x" + std::to_string(img.width) +
                          " is smaller than the " + std::to_string(kernel) + "x" + std::to_string(kernel) +
                          " median window");
    int r = kernel / 2;
    U8Image out(img.height, img.width, img.channels);
    std::vector<std::uint8_t> window(static_cast<std::size_t>(kernel) * static_cast<std::size_t>(kernel));
    std::size_t mid = window.size() / 2;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) {
                std::size_t k = 0;
                for (int dy = -r; dy <= r; ++dy) {
                    int yy = clamp_index(y + dy, img.height - 1);
                    for (int dx = -r; dx <= r; ++dx)
                        window[k++] = img.at(yy, clamp_index(x + dx, img.width - 1), c);
                }
                std::nth_element(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(mid), window.end());
                out.at(y, x, c) = window[mid];
            }
    return out;
}

U8Image resize_bilinear(const U8Image& img, int out_h, int out_w) {
    check_image(img);
    if (out_h < 1 || out_w < 1)
        throw ConfigError("resize target " + std::to_string(out_h) + "x" + std::to_string(out_w) + " is empty");
    U8Image out(out_h, out_w, img.channels);
    double sy_scale = static_cast<double>(img.height) / out_h;
    double sx_scale = static_cast<double>(img.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        double sy = (y + 0.5) * sy_scale - 0.5;
        int y0 = static_cast<int>(std::floor(sy));
        double dy = sy - y0;
        int y0c = clamp_index(y0, img.height - 1);
        int y1c = clamp_index(y0 + 1, img.height - 1);
        for (int x = 0; x < out_w; ++x) {
            double sx = (x + 0.5) * sx_scale - 0.5;
            int x0 = static_cast<int>(std::floor(sx));
            double dx = sx - x0;
            int x0c = clamp_index(x0, img.width - 1);
            int x1c = clamp_index(x0 + 1, img.width - 1);
            for (int c = 0; c < img.channels; ++c) {
                double v = (1.0 - dy) * ((1.0 - dx) * img.at(y0c, x0c, c) + dx * img.at(y0c, x1c, c)) +
                           dy * ((1.0 - dx) * img.at(y1c, x0c, c) + dx * img.at(y1c, x1c, c));
                out.at(y, x, c) = round_to_u8(v);
            }
        }
    }
    return out;
}

U8Image crop_and_resize(const U8Image& img, int top, int left, int crop_h, int crop_w) {
    check_image(img);
    if (crop_h < 1 || crop_w < 1 || top < 0 || left < 0 || top + crop_h > img.height || left + crop_w > img.width)
        throw ConfigError("crop window [" + std::to_string(top) + "," + std::to_string(left) + "] " +
                          std::to_string(crop_h) + "x" + std::to_string(crop_w) + " leaves the " +
                          std::to_string(img.height) + "x" + std::to_string(img.width) + " image");
    U8Image window(crop_h, crop_w, img.channels);
    for (int y = 0; y < crop_h; ++y)
        for (int x = 0; x < crop_w; ++x)
            for (int c = 0; c < img.channels; ++c) window.at(y, x, c) = img.at(top + y, left + x, c);
    return resize_bilinear(window, img.height, img.width);
}

U8Image rescale_keep_shape(const U8Image& img, double factor) {
    check_image(img);
    if (!(factor > 0.0)) throw ConfigError("rescale factor must be positive, got " + std::to_string(factor));
    int new_h = std::max(1, round_dim(factor * img.height));
    int new_w = std::max(1, round_dim(factor * img.width));
    U8Image resized = resize_bilinear(img, new_h, new_w);
    if (new_h == img.height && new_w == img.width) return resized;

    U8Image out(img.height, img.width, img.channels);
    for (int y = 0; y < img.height; ++y) {
        // diff >= 0: center-crop offset; diff < 0: center-pad with clamped
        // (edge-replicated) source index.
        int diff_h = new_h - img.height;
        int sy = diff_h >= 0 ? y + diff_h / 2 : clamp_index(y - (-diff_h) / 2, new_h - 1);
        for (int x = 0; x < img.width; ++x) {
            int diff_w = new_w - img.width;
            int sx = diff_w >= 0 ? x + diff_w / 2 : clamp_index(x - (-diff_w) / 2, new_w - 1);
            for (int c = 0; c < img.channels; ++c) out.at(y, x, c) = resized.at(sy, sx, c);
        }
    }
    return out;
}

} // namespace w2w
