#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "w2w/corpus.hpp"
#include "w2w/errors.hpp"

using namespace w2w;

namespace {

U8Image gradient_image(int h, int w, int c, int offset) {
    U8Image img(h, w, c);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>((static_cast<int>(i) + offset) % 256);
    return img;
}

Corpus small_corpus() {
    Corpus corpus;
    corpus.class_count = 3;
    for (int i = 0; i < 4; ++i) {
        CorpusSample s;
        s.id = 10 + i;
        s.label = (i % 3) + 1;
        s.pixels = gradient_image(4, 5, 2, i * 7);
        if (i == 2) {
            s.meta.is_spurious = true;
            s.meta.kind = CorruptionKind::sym_flip;
            s.meta.original_label = 3;
        }
        corpus.samples.push_back(std::move(s));
    }
    return corpus;
}

std::string fresh_dir(const char* name) {
    std::filesystem::path dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    return dir.string();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool same_corpus(const Corpus& a, const Corpus& b) {
    if (a.class_count != b.class_count || a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const auto& x = a.samples[i];
        const auto& y = b.samples[i];
        if (x.id != y.id || x.label != y.label) return false;
        if (x.meta.is_spurious != y.meta.is_spurious || x.meta.kind != y.meta.kind ||
            x.meta.original_label != y.meta.original_label)
            return false;
        if (!same_shape(x.pixels, y.pixels) || x.pixels.pixels != y.pixels.pixels) return false;
    }
    return true;
}

} // namespace

TEST_CASE("corruption kind names round-trip") {
    for (CorruptionKind k : {CorruptionKind::none, CorruptionKind::alien, CorruptionKind::sym_flip,
                             CorruptionKind::pair_flip, CorruptionKind::blur, CorruptionKind::crop,
                             CorruptionKind::scale})
        CHECK(parse_corruption_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_corruption_kind("smudge"), DataError);
}

TEST_CASE("corpus validate catches duplicate ids, bad labels, meta inconsistency") {
    Corpus c = small_corpus();
    CHECK_NOTHROW(c.validate());

    Corpus dup = small_corpus();
    dup.samples[1].id = dup.samples[0].id;
    CHECK_THROWS_AS(dup.validate(), DataError);

    Corpus bad_label = small_corpus();
    bad_label.samples[0].label = 4;
    CHECK_THROWS_AS(bad_label.validate(), DataError);
    bad_label.samples[0].label = 0;
    CHECK_THROWS_AS(bad_label.validate(), DataError);

    Corpus inconsistent = small_corpus();
    inconsistent.samples[0].meta.is_spurious = true; // kind stays none
    CHECK_THROWS_AS(inconsistent.validate(), DataError);

    Corpus drift = small_corpus();
    drift.samples[3].pixels = gradient_image(5, 4, 2, 0);
    CHECK_THROWS_AS(drift.validate(), DataError);
}

TEST_CASE("max_id and spurious_count") {
    Corpus c = small_corpus();
    CHECK(c.max_id() == 13);
    CHECK(c.spurious_count() == 1);
    CHECK(Corpus{}.max_id() == -1);
}

TEST_CASE("compute_stats matches a hand-computed per-channel mean") {
    Corpus c;
    c.class_count = 1;
    CorpusSample a;
    a.id = 0;
    a.label = 1;
    a.pixels = U8Image(1, 2, 2);
    a.pixels.pixels = {0, 255, 51, 102}; // ch0: 0, 51; ch1: 255, 102
    c.samples.push_back(a);
    CorpusSample b = a;
    b.id = 1;
    b.pixels.pixels = {255, 0, 204, 153}; // ch0: 255, 204; ch1: 0, 153
    c.samples.push_back(b);

    DatasetStats stats = compute_stats(c);
    REQUIRE(stats.channel_mean.size() == 2);
    CHECK(stats.channel_mean[0] == doctest::Approx((0 + 51 + 255 + 204) / 255.0 / 4.0).epsilon(1e-12));
    CHECK(stats.channel_mean[1] == doctest::Approx((255 + 102 + 0 + 153) / 255.0 / 4.0).epsilon(1e-12));

    CHECK_THROWS_AS(compute_stats(Corpus{}), DataError);
}

TEST_CASE("preprocess scales to [0,1] then subtracts the channel mean") {
    U8Image img(1, 1, 1);
    img.pixels = {255};
    Tensor unit = to_unit_tensor(img);
    CHECK(unit.data[0] == 1.0);
    REQUIRE(unit.shape == std::vector<int>{1, 1, 1});

    DatasetStats stats;
    stats.channel_mean = {0.25};
    Tensor t = preprocess(img, stats);
    CHECK(t.data[0] == 0.75);

    DatasetStats wrong;
    wrong.channel_mean = {0.1, 0.2};
    CHECK_THROWS_AS(preprocess(img, wrong), DataError);
}

TEST_CASE("prepare_training_data keeps ids and labels aligned") {
    Corpus c = small_corpus();
    DatasetStats stats = compute_stats(c);
    auto data = prepare_training_data(c, stats);
    REQUIRE(data.size() == 4);
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(data[i].id == c.samples[i].id);
        CHECK(data[i].label == c.samples[i].label);
        CHECK(data[i].x.shape == std::vector<int>{4, 5, 2});
    }
}

TEST_CASE("corpus directory round-trips exactly and writes deterministically") {
    Corpus c = small_corpus();
    std::string dir = fresh_dir("w2w_corpus_rt");
    write_corpus_dir(dir, c, {"source synthetic", "note round-trip test"});

    Corpus back = read_corpus_dir(dir);
    CHECK(same_corpus(c, back));

    std::string manifest = read_manifest(dir);
    CHECK(manifest.find("samples 4") != std::string::npos);
    CHECK(manifest.find("class_count 3") != std::string::npos);
    CHECK(manifest.find("shape 4 5 2") != std::string::npos);
    CHECK(manifest.find("spurious 1") != std::string::npos);
    CHECK(manifest.find("note round-trip test") != std::string::npos);

    // byte-identical rewrite
    std::string dir2 = fresh_dir("w2w_corpus_rt2");
    write_corpus_dir(dir2, c, {"source synthetic", "note round-trip test"});
    for (const char* name : {"manifest.txt", "samples.csv", "pixels.u8"})
        CHECK(slurp(std::filesystem::path(dir) / name) == slurp(std::filesystem::path(dir2) / name));
}

TEST_CASE("corpus directory reader rejects tampered files") {
    Corpus c = small_corpus();

    {
        std::string dir = fresh_dir("w2w_corpus_bad1");
        write_corpus_dir(dir, c, {});
        std::ofstream f(std::filesystem::path(dir) / "pixels.u8", std::ios::binary | std::ios::app);
        f << "x";
        f.close();
        CHECK_THROWS_AS(read_corpus_dir(dir), DataError);
    }
    {
        std::string dir = fresh_dir("w2w_corpus_bad2");
        write_corpus_dir(dir, c, {});
        std::string csv = slurp(std::filesystem::path(dir) / "samples.csv");
        csv += "99,1,0,none,\n"; // row count no longer matches the manifest
        std::ofstream f(std::filesystem::path(dir) / "samples.csv", std::ios::binary);
        f << csv;
        f.close();
        CHECK_THROWS_AS(read_corpus_dir(dir), DataError);
    }
    {
        std::string dir = fresh_dir("w2w_corpus_bad3");
        write_corpus_dir(dir, c, {});
        std::ofstream f(std::filesystem::path(dir) / "manifest.txt", std::ios::binary);
        f << "not a manifest\n";
        f.close();
        CHECK_THROWS_AS(read_corpus_dir(dir), DataError);
    }
    CHECK_THROWS_AS(read_corpus_dir(fresh_dir("w2w_corpus_missing")), DataError);
}
