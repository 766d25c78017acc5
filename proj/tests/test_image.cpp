#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "w2w/errors.hpp"
#include "w2w/image.hpp"

using namespace w2w;

namespace {

U8Image from_values(int h, int w, std::vector<std::uint8_t> vals) {
    U8Image img(h, w, 1);
    img.pixels = std::move(vals);
    return img;
}

} // namespace

TEST_CASE("median blur of a constant image is the identity") {
    U8Image img(12, 12, 1);
    for (auto& p : img.pixels) p = 77;
    U8Image out = median_blur(img, 11);
    CHECK(out.pixels == img.pixels);
}

TEST_CASE("median blur 11x11 removes an isolated hot pixel") {
    // 120 zeros + one 255 in every window that sees the hot pixel -> median 0
    U8Image img(12, 12, 1);
    img.at(6, 6, 0) = 255;
    U8Image out = median_blur(img, 11);
    for (auto p : out.pixels) CHECK(p == 0);
}

TEST_CASE("median blur 3x3 on a 3x3 gradient, worked by hand") {
    U8Image img = from_values(3, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8});
    U8Image out = median_blur(img, 3);
    // corner (0,0): replicated window {0,0,1,0,0,1,3,3,4} -> 1
    CHECK(out.at(0, 0, 0) == 1);
    CHECK(out.at(1, 1, 0) == 4);
    // corner (2,2): window {4,5,5,7,8,8,7,8,8} -> 7
    CHECK(out.at(2, 2, 0) == 7);
}

TEST_CASE("median blur validates kernel and image size") {
    U8Image img(8, 8, 1);
    CHECK_THROWS_AS(median_blur(img, 4), ConfigError);
    CHECK_THROWS_AS(median_blur(img, 0), ConfigError);
    CHECK_THROWS_AS(median_blur(img, 11), ConfigError); // image smaller than window
    CHECK_NOTHROW(median_blur(img, 7));
}

TEST_CASE("bilinear resize to the input shape is the identity") {
    U8Image img = from_values(2, 3, {10, 200, 30, 40, 50, 255});
    U8Image out = resize_bilinear(img, 2, 3);
    CHECK(out.pixels == img.pixels);
}

TEST_CASE("bilinear upscale 1x2 -> 1x4, half-pixel centers worked by hand") {
    U8Image img = from_values(1, 2, {0, 100});
    U8Image out = resize_bilinear(img, 1, 4);
    CHECK(out.pixels == std::vector<std::uint8_t>{0, 25, 75, 100});
}

TEST_CASE("bilinear downscale 1x4 -> 1x2 averages pairs") {
    U8Image img = from_values(1, 4, {0, 100, 200, 40});
    U8Image out = resize_bilinear(img, 1, 2);
    CHECK(out.pixels == std::vector<std::uint8_t>{50, 120});
}

TEST_CASE("bilinear output rounds half up") {
    // single output samples the midpoint (1+2)/2 = 1.5 -> 2
    U8Image img = from_values(1, 2, {1, 2});
    U8Image out = resize_bilinear(img, 1, 1);
    CHECK(out.pixels == std::vector<std::uint8_t>{2});
}

TEST_CASE("resize rejects empty targets") {
    U8Image img(2, 2, 1);
    CHECK_THROWS_AS(resize_bilinear(img, 0, 2), ConfigError);
    CHECK_THROWS_AS(resize_bilinear(img, 2, -1), ConfigError);
}

TEST_CASE("crop_and_resize keeps the input shape; full-window crop is the identity") {
    U8Image img = from_values(2, 3, {10, 200, 30, 40, 50, 255});
    U8Image full = crop_and_resize(img, 0, 0, 2, 3);
    CHECK(full.pixels == img.pixels);

    U8Image sub = crop_and_resize(img, 0, 1, 2, 2);
    CHECK(sub.height == 2);
    CHECK(sub.width == 3);
    CHECK(sub.channels == 1);

    CHECK_THROWS_AS(crop_and_resize(img, 0, 2, 2, 2), ConfigError);
    CHECK_THROWS_AS(crop_and_resize(img, -1, 0, 2, 2), ConfigError);
    CHECK_THROWS_AS(crop_and_resize(img, 0, 0, 3, 3), ConfigError);
}

TEST_CASE("rescale factor 1 is the identity") {
    U8Image img = from_values(2, 2, {9, 18, 27, 36});
    U8Image out = rescale_keep_shape(img, 1.0);
    CHECK(out.pixels == img.pixels);
}

TEST_CASE("rescale shrink pads with replicated edges, worked by hand") {
    std::vector<std::uint8_t> vals(16);
    for (int i = 0; i < 16; ++i) vals[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    U8Image img = from_values(4, 4, vals);
    // 0.5x: bilinear 2x2 = {3, 5, 11, 13} (2x2 block means, rounded half-up),
    // then centered in 4x4 with edge replication
    U8Image out = rescale_keep_shape(img, 0.5);
    std::vector<std::uint8_t> want{3, 3, 5, 5, 3, 3, 5, 5, 11, 11, 13, 13, 11, 11, 13, 13};
    CHECK(out.pixels == want);
}

TEST_CASE("rescale enlarge center-crops, worked by hand") {
    U8Image img = from_values(2, 2, {0, 100, 200, 40});
    // 2x: bilinear 4x4, keep the central 2x2 = {59, 76, 126, 79}
    U8Image out = rescale_keep_shape(img, 2.0);
    CHECK(out.pixels == std::vector<std::uint8_t>{59, 76, 126, 79});
}

TEST_CASE("rescale validates its factor and preserves shape") {
    U8Image img(5, 7, 2);
    CHECK_THROWS_AS(rescale_keep_shape(img, 0.0), ConfigError);
    CHECK_THROWS_AS(rescale_keep_shape(img, -2.0), ConfigError);
    for (double f : {0.5, 0.77, 1.3, 1.5}) {
        U8Image out = rescale_keep_shape(img, f);
        CHECK(out.height == 5);
        CHECK(out.width == 7);
        CHECK(out.channels == 2);
    }
}
