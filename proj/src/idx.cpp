#include "w2w/idx.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "w2w/errors.hpp"

namespace w2w {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803u;
constexpr std::uint32_t kLabelsMagic = 0x00000801u;

std::string read_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::uint32_t read_u32_be(const std::string& bytes, std::size_t offset, const std::string& path,
                          const std::string& field) {
    if (bytes.size() < offset + 4)
        throw DataError("idx file '" + path + "': truncated at byte offset " + std::to_string(bytes.size()) +
                        " while reading " + field + " (need " + std::to_string(offset + 4) + " bytes)");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + offset;
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

void append_u32_be(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

std::string hex_magic(std::uint32_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    for (int shift = 28; shift >= 0; shift -= 4) s.push_back(digits[(v >> shift) & 0xf]);
    return s;
}

void write_binary(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw DataError("write to '" + path + "' failed");
}

} // namespace

std::vector<U8Image> load_idx_images(const std::string& images_path) {
    std::string ib = read_binary(images_path);
    std::uint32_t imagic = read_u32_be(ib, 0, images_path, "magic");
    if (imagic != kImagesMagic)
        throw DataError("idx file '" + images_path + "': wrong magic " + hex_magic(imagic) + " at byte offset 0 (expected " +
                        hex_magic(kImagesMagic) + ")");
    std::uint32_t count = read_u32_be(ib, 4, images_path, "image count");
    std::uint32_t rows = read_u32_be(ib, 8, images_path, "row count");
    std::uint32_t cols = read_u32_be(ib, 12, images_path, "column count");
    std::size_t need = 16 + static_cast<std::size_t>(count) * rows * cols;
    if (ib.size() < need)
        throw DataError("idx file '" + images_path + "': truncated at byte offset " + std::to_string(ib.size()) +
                        " (header promises " + std::to_string(need) + " bytes)");
    if (ib.size() > need)
        throw DataError("idx file '" + images_path + "': " + std::to_string(ib.size() - need) +
                        " trailing bytes at byte offset " + std::to_string(need));
    if (rows == 0 || cols == 0) throw DataError("idx file '" + images_path + "': zero image dimensions");

    std::vector<U8Image> images;
    images.reserve(count);
    std::size_t per_image = static_cast<std::size_t>(rows) * cols;
    for (std::uint32_t i = 0; i < count; ++i) {
        U8Image img(static_cast<int>(rows), static_cast<int>(cols), 1);
        const char* src = ib.data() + 16 + static_cast<std::size_t>(i) * per_image;
        std::copy(src, src + per_image, reinterpret_cast<char*>(img.pixels.data()));
        images.push_back(std::move(img));
    }
    return images;
}

Corpus load_idx(const std::string& images_path, const std::string& labels_path) {
    std::vector<U8Image> images = load_idx_images(images_path);
    std::size_t count = images.size();

    std::string lb = read_binary(labels_path);
    std::uint32_t lmagic = read_u32_be(lb, 0, labels_path, "magic");
    if (lmagic != kLabelsMagic)
        throw DataError("idx file '" + labels_path + "': wrong magic " + hex_magic(lmagic) + " at byte offset 0 (expected " +
                        hex_magic(kLabelsMagic) + ")");
    std::uint32_t lcount = read_u32_be(lb, 4, labels_path, "label count");
    std::size_t lneed = 8 + static_cast<std::size_t>(lcount);
    if (lb.size() < lneed)
        throw DataError("idx file '" + labels_path + "': truncated at byte offset " + std::to_string(lb.size()) +
                        " (header promises " + std::to_string(lneed) + " bytes)");
    if (lb.size() > lneed)
        throw DataError("idx file '" + labels_path + "': " + std::to_string(lb.size() - lneed) +
                        " trailing bytes at byte offset " + std::to_string(lneed));
    if (lcount != count)
        throw DataError("idx count mismatch: '" + images_path + "' has " + std::to_string(count) + " images but '" +
                        labels_path + "' has " + std::to_string(lcount) + " labels");

    Corpus corpus;
    int max_label = 0;
    corpus.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        CorpusSample s;
        s.id = static_cast<std::int64_t>(i);
        s.pixels = std::move(images[i]);
        s.label = static_cast<int>(static_cast<unsigned char>(lb[8 + i])) + 1;
        if (s.label > max_label) max_label = s.label;
        corpus.samples.push_back(std::move(s));
    }
    corpus.class_count = max_label;
    return corpus;
}

void write_idx_images(const std::string& path, const std::vector<U8Image>& images) {
    std::string out;
    append_u32_be(out, kImagesMagic);
    append_u32_be(out, static_cast<std::uint32_t>(images.size()));
    int rows = images.empty() ? 0 : images[0].height;
    int cols = images.empty() ? 0 : images[0].width;
    append_u32_be(out, static_cast<std::uint32_t>(rows));
    append_u32_be(out, static_cast<std::uint32_t>(cols));
    for (const auto& img : images) {
        if (img.channels != 1) throw DataError("idx images are single-channel; got " + std::to_string(img.channels));
        if (img.height != rows || img.width != cols) throw DataError("idx images must share one shape");
        out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    }
    write_binary(path, out);
}

void write_idx_labels(const std::string& path, const std::vector<int>& labels) {
    std::string out;
    append_u32_be(out, kLabelsMagic);
    append_u32_be(out, static_cast<std::uint32_t>(labels.size()));
    for (int label : labels) {
        if (label < 1 || label > 256) throw DataError("idx label " + std::to_string(label) + " outside [1, 256]");
        out.push_back(static_cast<char>(label - 1));
    }
    write_binary(path, out);
}

} // namespace w2w
