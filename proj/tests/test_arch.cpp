#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "w2w/arch.hpp"
#include "w2w/errors.hpp"

using namespace w2w;

TEST_CASE("default arch shape chain on 28x28x1") {
    auto spec = default_arch(10, {28, 28, 1});
    auto dims = spec.layer_dims();
    REQUIRE(dims.size() == 4);
    CHECK(dims[0] == Dims{26, 26, 8}); // 3x3 valid conv
    CHECK(dims[1] == Dims{13, 13, 8}); // 2x2 avg pool
    CHECK(dims[2] == Dims{1, 1, 64});
    CHECK(dims[3] == Dims{1, 1, 10});
    CHECK(spec.describe() == "conv 8 3 | pool 2 | dense 64 | dense 10");
}

TEST_CASE("odd extents floor through pooling") {
    ArchSpec spec;
    spec.layers = {pool_layer(2), dense_layer(5)};
    spec.class_count = 5;
    spec.input = {13, 13, 3};
    auto dims = spec.layer_dims();
    CHECK(dims[0] == Dims{6, 6, 3});
}

TEST_CASE("parse round-trips describe") {
    auto spec = parse_arch("conv 8 3 | pool 2 | dense 64 | dense 10", 0.3, 10, {28, 28, 1});
    CHECK(spec.describe() == "conv 8 3 | pool 2 | dense 64 | dense 10");
    auto again = parse_arch(spec.describe(), 0.3, 10, {28, 28, 1});
    CHECK(again.describe() == spec.describe());
}

TEST_CASE("parse tolerates uneven spacing") {
    auto spec = parse_arch("  conv 4 5|pool 2 |  dense 7 ", 0.0, 7, {32, 32, 3});
    CHECK(spec.describe() == "conv 4 5 | pool 2 | dense 7");
}

TEST_CASE("parse rejects junk") {
    CHECK_THROWS_AS(parse_arch("conv 8", 0.3, 10, {28, 28, 1}), ConfigError);
    CHECK_THROWS_AS(parse_arch("soft 3 | dense 10", 0.3, 10, {28, 28, 1}), ConfigError);
    CHECK_THROWS_AS(parse_arch("", 0.3, 10, {28, 28, 1}), ConfigError);
}

TEST_CASE("kernel larger than its input is rejected") {
    ArchSpec spec;
    spec.layers = {conv_layer(4, 3), dense_layer(2)};
    spec.class_count = 2;
    spec.input = {2, 2, 1};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("pool window larger than its input is rejected") {
    ArchSpec spec;
    spec.layers = {pool_layer(4), dense_layer(2)};
    spec.class_count = 2;
    spec.input = {3, 3, 1};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("conv or pool after dense is rejected") {
    ArchSpec a;
    a.layers = {dense_layer(8), conv_layer(2, 3), dense_layer(2)};
    a.class_count = 2;
    a.input = {8, 8, 1};
    CHECK_THROWS_AS(a.validate(), ConfigError);

    ArchSpec b;
    b.layers = {dense_layer(8), pool_layer(2), dense_layer(2)};
    b.class_count = 2;
    b.input = {8, 8, 1};
    CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("terminal layer must be dense with class_count units") {
    ArchSpec a;
    a.layers = {conv_layer(4, 3), dense_layer(5)};
    a.class_count = 10;
    a.input = {8, 8, 1};
    CHECK_THROWS_AS(a.validate(), ConfigError); // width mismatch

    ArchSpec b;
    b.layers = {conv_layer(4, 3), pool_layer(2)};
    b.class_count = 10;
    b.input = {8, 8, 1};
    CHECK_THROWS_AS(b.validate(), ConfigError); // non-dense terminal
}

TEST_CASE("dropout rate and class count bounds") {
    auto good = default_arch(2, {8, 8, 1});
    good.dropout_rate = 0.0;
    CHECK_NOTHROW(good.validate());

    auto bad = default_arch(2, {8, 8, 1});
    bad.dropout_rate = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.dropout_rate = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    ArchSpec one;
    one.layers = {dense_layer(1)};
    one.class_count = 1;
    one.input = {1, 1, 4};
    CHECK_THROWS_AS(one.validate(), ConfigError);
}

TEST_CASE("empty layer list is rejected") {
    ArchSpec spec;
    spec.class_count = 2;
    spec.input = {4, 4, 1};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}
