#include "w2w/cifar.hpp"

#include <fstream>
#include <sstream>

#include "w2w/errors.hpp"

namespace w2w {

namespace {

constexpr int kSide = 32;
constexpr int kChannels = 3;
constexpr std::size_t kPlane = static_cast<std::size_t>(kSide) * kSide;
constexpr std::size_t kRecord = 1 + kPlane * kChannels;

} // namespace

Corpus load_cifar_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    std::string bytes = ss.str();

    if (bytes.empty()) throw DataError("cifar file '" + path + "': empty file");
    if (bytes.size() % kRecord != 0)
        throw DataError("cifar file '" + path + "': size " + std::to_string(bytes.size()) +
                        " is not a multiple of the " + std::to_string(kRecord) + "-byte record");

    std::size_t n = bytes.size() / kRecord;
    Corpus corpus;
    corpus.class_count = 10;
    corpus.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto* rec = reinterpret_cast<const unsigned char*>(bytes.data()) + i * kRecord;
        int raw_label = rec[0];
        if (raw_label > 9)
            throw DataError("cifar file '" + path + "': record " + std::to_string(i) + " label byte " +
                            std::to_string(raw_label) + " out of range [0, 9]");
        CorpusSample s;
        s.id = static_cast<std::int64_t>(i);
        s.label = raw_label + 1;
        s.pixels = U8Image(kSide, kSide, kChannels);
        for (int c = 0; c < kChannels; ++c) {
            const unsigned char* plane = rec + 1 + static_cast<std::size_t>(c) * kPlane;
            for (std::size_t p = 0; p < kPlane; ++p)
                s.pixels.pixels[p * kChannels + static_cast<std::size_t>(c)] = plane[p];
        }
        corpus.samples.push_back(std::move(s));
    }
    return corpus;
}

void write_cifar_binary(const std::string& path, const Corpus& corpus) {
    std::string out;
    out.reserve(corpus.samples.size() * kRecord);
    for (const auto& s : corpus.samples) {
        if (s.pixels.height != kSide || s.pixels.width != kSide || s.pixels.channels != kChannels)
            throw DataError("cifar writer needs 32x32x3 images; sample id " + std::to_string(s.id) + " differs");
        if (s.label < 1 || s.label > 10)
            throw DataError("cifar writer needs labels in [1, 10]; sample id " + std::to_string(s.id) + " has " +
                            std::to_string(s.label));
        out.push_back(static_cast<char>(s.label - 1));
        for (int c = 0; c < kChannels; ++c)
            for (std::size_t p = 0; p < kPlane; ++p)
                out.push_back(static_cast<char>(s.pixels.pixels[p * kChannels + static_cast<std::size_t>(c)]));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write to '" + path + "' failed");
}

} // namespace w2w
