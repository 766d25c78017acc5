#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "w2w/rng.hpp"

using namespace w2w;

TEST_CASE("splitmix64 matches the published reference stream") {
    Rng r(0);
    CHECK(r.next_u64() == 0xe220a8397b1dcdafull);
    CHECK(r.next_u64() == 0x6e789e6aa1b965f4ull);
    CHECK(r.next_u64() == 0x06c45d188009454full);
    CHECK(r.next_u64() == 0xf88bb8a8724c81ecull);
    CHECK(r.next_u64() == 0x1b39896a51a8749bull);
}

TEST_CASE("splitmix64 nonzero seed stream") {
    Rng r(0x0ddc0ffeebadf00dull);
    CHECK(r.next_u64() == 0x0916df851e2aee44ull);
    CHECK(r.next_u64() == 0x9ade0f09ffca1bc4ull);
    CHECK(r.next_u64() == 0xea0f3dbc1648bdabull);
}

TEST_CASE("next_double is (u64 >> 11) * 2^-53") {
    Rng r(42);
    CHECK(r.next_double() == 0x1.7bae644c5fd6dp-1);
    CHECK(r.next_double() == 0x1.477f199d93378p-3);
    CHECK(r.next_double() == 0x1.1d499d5c4c3e6p-2);
}

TEST_CASE("next_double stays in [0, 1)") {
    Rng r(7);
    for (int i = 0; i < 100000; ++i) {
        double v = r.next_double();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("uniform respects bounds and degenerate range") {
    Rng r(3);
    for (int i = 0; i < 1000; ++i) {
        double v = r.uniform(-2.5, 4.0);
        CHECK(v >= -2.5);
        CHECK(v < 4.0);
    }
    CHECK(r.uniform(2.0, 2.0) == 2.0);
}

TEST_CASE("next_below covers [0, n) roughly evenly") {
    Rng r(11);
    std::vector<int> hits(8, 0);
    for (int i = 0; i < 8000; ++i) {
        std::uint64_t v = r.next_below(8);
        REQUIRE(v < 8);
        ++hits[v];
    }
    for (int h : hits) {
        CHECK(h > 800);
        CHECK(h < 1200);
    }
}

TEST_CASE("normal sample mean and spread") {
    Rng r(5);
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = r.normal(1.0, 2.0);
        REQUIRE(std::isfinite(v));
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / n;
    double sd = std::sqrt(sumsq / n - mean * mean);
    CHECK(mean == doctest::Approx(1.0).epsilon(0.1));
    CHECK(sd == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("mix_seed frozen values and order sensitivity") {
    CHECK(mix_seed(7, {3, 5}) == 0xf647de43e60ec467ull);
    CHECK(mix_seed(5, {3, 7}) == 0xe82a321d452c707full);
    CHECK(mix_seed(7, {3, 5}) == mix_seed(7, {3, 5}));
    CHECK(mix_seed(7, {3, 5}) != mix_seed(7, {5, 3}));
    CHECK(mix_seed(7, {3, 5}) != mix_seed(7, {3, 6}));
    CHECK(mix_seed(7, {3}) != mix_seed(8, {3}));
}

TEST_CASE("identical seeds give identical streams") {
    Rng a(123456789), b(123456789);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());
}
