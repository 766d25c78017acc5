#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "w2w/checkpoint.hpp"
#include "w2w/errors.hpp"

using namespace w2w;

namespace {

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const std::string& p, const std::string& bytes) {
    std::ofstream f(p, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TrainedModel sample_model() {
    ArchSpec arch = parse_arch("conv 2 3 | pool 2 | dense 6 | dense 3", 0.3, 3, Dims{7, 7, 1});
    TrainedModel m;
    m.params = init_model(arch, 99);
    m.stats.channel_mean = {0.25};
    return m;
}

bool same_params(const ModelParameters& a, const ModelParameters& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        if (a.layers[i].weights.shape != b.layers[i].weights.shape) return false;
        if (a.layers[i].weights.data != b.layers[i].weights.data) return false;
        if (a.layers[i].bias.data != b.layers[i].bias.data) return false;
    }
    return true;
}

} // namespace

TEST_CASE("checkpoint round-trip is value-exact") {
    TrainedModel m = sample_model();
    std::string p = tmp_path("w2w_ckpt_rt");
    save_checkpoint(p, m);
    TrainedModel back = load_checkpoint(p);

    CHECK(same_params(m.params, back.params)); // doubles compare bitwise equal
    CHECK(back.stats.channel_mean == m.stats.channel_mean);
    CHECK(back.params.arch.describe() == "conv 2 3 | pool 2 | dense 6 | dense 3");
    CHECK(back.params.arch.class_count == 3);
    CHECK(back.params.arch.dropout_rate == 0.3);
    CHECK(back.params.arch.input == Dims{7, 7, 1});
}

TEST_CASE("checkpoint round-trip after SGD updates") {
    TrainedModel m = sample_model();
    std::vector<TrainSample> data;
    Rng rng(5);
    for (int i = 0; i < 12; ++i) {
        Tensor x({7, 7, 1});
        for (auto& v : x.data) v = rng.uniform(-0.5, 0.5);
        data.push_back({x, static_cast<int>(i % 3) + 1, i});
    }
    TrainingConfig cfg;
    cfg.batch_size = 4;
    sgd_epoch(m.params, data, cfg, 1234);
    sgd_epoch(m.params, data, cfg, 1235);

    std::string p = tmp_path("w2w_ckpt_sgd");
    save_checkpoint(p, m);
    CHECK(same_params(m.params, load_checkpoint(p).params));
}

TEST_CASE("checkpoint bytes are write-deterministic") {
    TrainedModel m = sample_model();
    std::string p1 = tmp_path("w2w_ckpt_d1"), p2 = tmp_path("w2w_ckpt_d2");
    save_checkpoint(p1, m);
    save_checkpoint(p2, m);
    CHECK(slurp(p1) == slurp(p2));
    std::string head = slurp(p1).substr(0, 16);
    CHECK(head == "w2w-checkpoint 1");
}

TEST_CASE("checkpoint loader rejects malformed files") {
    TrainedModel m = sample_model();
    std::string p = tmp_path("w2w_ckpt_good");
    save_checkpoint(p, m);
    std::string good = slurp(p);
    std::string bad = tmp_path("w2w_ckpt_bad");

    // truncated blob
    spit(bad, good.substr(0, good.size() - 2));
    CHECK_THROWS_AS(load_checkpoint(bad), DataError);

    // trailing bytes
    spit(bad, good + "xx");
    CHECK_THROWS_AS(load_checkpoint(bad), DataError);

    // tampered header
    std::string tampered = good;
    tampered[0] = 'x';
    spit(bad, tampered);
    CHECK_THROWS_AS(load_checkpoint(bad), DataError);

    // value count disagreeing with the architecture
    std::string miscounted = good;
    std::size_t vpos = miscounted.find("values ");
    miscounted.replace(vpos, miscounted.find('\n', vpos) - vpos, "values 7");
    spit(bad, miscounted);
    CHECK_THROWS_AS(load_checkpoint(bad), DataError);

    // non-finite parameter: +inf float32 is 0x7f800000 little-endian
    std::string poisoned = good;
    std::size_t blob_start = poisoned.find("---\n") + 4;
    poisoned[blob_start + 0] = '\x00';
    poisoned[blob_start + 1] = '\x00';
    poisoned[blob_start + 2] = '\x80';
    poisoned[blob_start + 3] = '\x7f';
    spit(bad, poisoned);
    CHECK_THROWS_AS(load_checkpoint(bad), DataError);

    CHECK_THROWS_AS(load_checkpoint(tmp_path("w2w_ckpt_missing")), DataError);
}

TEST_CASE("checkpoint save validates channel statistics") {
    TrainedModel m = sample_model();
    m.stats.channel_mean = {0.1, 0.2}; // input has one channel
    CHECK_THROWS_AS(save_checkpoint(tmp_path("w2w_ckpt_chan"), m), DataError);
}
