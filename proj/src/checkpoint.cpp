#include "w2w/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "w2w/errors.hpp"
#include "w2w/format.hpp"

namespace w2w {

namespace {

void append_f32_le(std::string& out, double v) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    out.push_back(static_cast<char>(bits & 0xff));
    out.push_back(static_cast<char>((bits >> 8) & 0xff));
    out.push_back(static_cast<char>((bits >> 16) & 0xff));
    out.push_back(static_cast<char>((bits >> 24) & 0xff));
}

double read_f32_le(const unsigned char* p) {
    std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    return static_cast<double>(std::bit_cast<float>(bits));
}

} // namespace

void save_checkpoint(const std::string& path, const TrainedModel& model) {
    const ArchSpec& arch = model.params.arch;
    arch.validate();
    if (static_cast<int>(model.stats.channel_mean.size()) != arch.input.c)
        throw DataError("checkpoint: statistics cover " + std::to_string(model.stats.channel_mean.size()) +
                        " channels, architecture input has " + std::to_string(arch.input.c));

    std::size_t count = 0;
    for (const auto& layer : model.params.layers) count += layer.weights.size() + layer.bias.size();

    std::ostringstream head;
    head << "w2w-checkpoint 1\n";
    head << "arch " << arch.describe() << "\n";
    head << "dropout " << format_double(arch.dropout_rate) << "\n";
    head << "classes " << arch.class_count << "\n";
    head << "input " << arch.input.h << " " << arch.input.w << " " << arch.input.c << "\n";
    head << "channel_mean";
    for (double m : model.stats.channel_mean) head << " " << format_double(m);
    head << "\n";
    head << "values " << count << "\n";
    head << "---\n";

    std::string blob = head.str();
    blob.reserve(blob.size() + count * 4);
    for (const auto& layer : model.params.layers) {
        for (double v : layer.weights.data) append_f32_le(blob, v);
        for (double v : layer.bias.data) append_f32_le(blob, v);
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!f) throw DataError("write to '" + path + "' failed");
}

TrainedModel load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    std::string bytes = ss.str();

    auto fail = [&](const std::string& what) { return DataError("checkpoint '" + path + "': " + what); };

    std::size_t pos = 0;
    auto next_line = [&]() -> std::string {
        std::size_t nl = bytes.find('\n', pos);
        if (nl == std::string::npos) throw fail("truncated header");
        std::string line = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        return line;
    };

    if (next_line() != "w2w-checkpoint 1") throw fail("missing 'w2w-checkpoint 1' header");

    std::string arch_text, mean_text;
    double dropout = -1.0;
    long long classes = -1, h = -1, w = -1, c = -1, count = -1;
    for (;;) {
        std::string line = next_line();
        if (line == "---") break;
        std::size_t sp = line.find(' ');
        std::string key = sp == std::string::npos ? line : line.substr(0, sp);
        std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
        if (key == "arch") {
            arch_text = rest;
        } else if (key == "dropout") {
            if (!parse_double(rest, dropout)) throw fail("bad dropout line");
        } else if (key == "classes") {
            if (!parse_i64(rest, classes)) throw fail("bad classes line");
        } else if (key == "input") {
            std::istringstream in(rest);
            if (!(in >> h >> w >> c)) throw fail("bad input line");
        } else if (key == "channel_mean") {
            mean_text = rest;
        } else if (key == "values") {
            if (!parse_i64(rest, count)) throw fail("bad values line");
        } else {
            throw fail("unknown header key '" + key + "'");
        }
    }
    if (arch_text.empty()) throw fail("missing arch line");
    if (dropout < 0.0) throw fail("missing dropout line");
    if (classes < 1) throw fail("missing classes line");
    if (h < 1 || w < 1 || c < 1) throw fail("missing input line");
    if (count < 0) throw fail("missing values line");

    TrainedModel model;
    std::istringstream means(mean_text);
    std::string tok;
    while (means >> tok) {
        double m = 0.0;
        if (!parse_double(tok, m)) throw fail("bad channel_mean entry '" + tok + "'");
        model.stats.channel_mean.push_back(m);
    }
    if (static_cast<long long>(model.stats.channel_mean.size()) != c)
        throw fail("channel_mean has " + std::to_string(model.stats.channel_mean.size()) + " entries for " +
                   std::to_string(c) + " input channels");

    ArchSpec arch = parse_arch(arch_text, dropout, static_cast<int>(classes),
                               Dims{static_cast<int>(h), static_cast<int>(w), static_cast<int>(c)});
    // init_model supplies correctly shaped tensors; values come from the blob.
    model.params = init_model(arch, 0);
    std::size_t have = 0;
    for (const auto& layer : model.params.layers) have += layer.weights.size() + layer.bias.size();
    if (have != static_cast<std::size_t>(count))
        throw fail("values " + std::to_string(count) + " does not match the architecture's " + std::to_string(have) +
                   " parameters");

    if (bytes.size() - pos != static_cast<std::size_t>(count) * 4)
        throw fail("parameter blob holds " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                   std::to_string(static_cast<std::size_t>(count) * 4));

    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + pos;
    std::size_t idx = 0;
    for (auto& layer : model.params.layers) {
        for (double& v : layer.weights.data) {
            v = read_f32_le(p + idx * 4);
            ++idx;
        }
        for (double& v : layer.bias.data) {
            v = read_f32_le(p + idx * 4);
            ++idx;
        }
    }
    for (const auto& layer : model.params.layers) {
        for (double v : layer.weights.data)
            if (!std::isfinite(v)) throw fail("non-finite weight value");
        for (double v : layer.bias.data)
            if (!std::isfinite(v)) throw fail("non-finite bias value");
    }
    return model;
}

} // namespace w2w
