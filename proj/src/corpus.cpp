#include "w2w/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "w2w/errors.hpp"
#include "w2w/format.hpp"

namespace w2w {

const char* to_string(CorruptionKind k) {
    switch (k) {
        case CorruptionKind::none: return "none";
        case CorruptionKind::alien: return "alien";
        case CorruptionKind::sym_flip: return "sym_flip";
        case CorruptionKind::pair_flip: return "pair_flip";
        case CorruptionKind::blur: return "blur";
        case CorruptionKind::crop: return "crop";
        case CorruptionKind::scale: return "scale";
    }
    return "?";
}

CorruptionKind parse_corruption_kind(const std::string& s) {
    for (CorruptionKind k : {CorruptionKind::none, CorruptionKind::alien, CorruptionKind::sym_flip,
                             CorruptionKind::pair_flip, CorruptionKind::blur, CorruptionKind::crop,
                             CorruptionKind::scale})
        if (s == to_string(k)) return k;
    throw DataError("unknown corruption kind '" + s + "'");
}

bool same_shape(const U8Image& a, const U8Image& b) {
    return a.height == b.height && a.width == b.width && a.channels == b.channels;
}

std::int64_t Corpus::max_id() const {
    std::int64_t m = -1;
    for (const auto& s : samples)
        if (s.id > m) m = s.id;
    return m;
}

std::size_t Corpus::spurious_count() const {
    std::size_t n = 0;
    for (const auto& s : samples) n += s.meta.is_spurious ? 1 : 0;
    return n;
}

void Corpus::validate() const {
    if (class_count < 1 && !samples.empty()) throw DataError("corpus class_count must be >= 1");
    std::unordered_set<std::int64_t> seen;
    seen.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const CorpusSample& s = samples[i];
        if (!seen.insert(s.id).second)
            throw DataError("duplicate sample id " + std::to_string(s.id));
        if (s.label < 1 || s.label > class_count)
            throw DataError("sample id " + std::to_string(s.id) + ": label " + std::to_string(s.label) +
                            " outside [1, " + std::to_string(class_count) + "]");
        if (!same_shape(s.pixels, samples[0].pixels))
            throw DataError("sample id " + std::to_string(s.id) + ": image shape differs from first sample");
        if (s.pixels.size() != static_cast<std::size_t>(s.pixels.height) * static_cast<std::size_t>(s.pixels.width) *
                                   static_cast<std::size_t>(s.pixels.channels))
            throw DataError("sample id " + std::to_string(s.id) + ": pixel buffer size mismatch");
        if (s.meta.is_spurious != (s.meta.kind != CorruptionKind::none))
            throw DataError("sample id " + std::to_string(s.id) + ": is_spurious inconsistent with kind");
    }
}

DatasetStats compute_stats(const Corpus& corpus) {
    if (corpus.samples.empty()) throw DataError("cannot compute statistics of an empty corpus");
    const U8Image& first = corpus.samples[0].pixels;
    int ch = first.channels;
    std::vector<double> sum(static_cast<std::size_t>(ch), 0.0);
    for (const auto& s : corpus.samples) {
        if (!same_shape(s.pixels, first)) throw DataError("corpus images have inconsistent shapes");
        const auto& px = s.pixels.pixels;
        for (std::size_t i = 0; i < px.size(); ++i)
            sum[i % static_cast<std::size_t>(ch)] += static_cast<double>(px[i]) / 255.0;
    }
    double per_channel = static_cast<double>(corpus.samples.size()) * first.height * first.width;
    DatasetStats stats;
    stats.channel_mean.resize(static_cast<std::size_t>(ch));
    for (int c = 0; c < ch; ++c) stats.channel_mean[static_cast<std::size_t>(c)] = sum[static_cast<std::size_t>(c)] / per_channel;
    return stats;
}

Tensor to_unit_tensor(const U8Image& img) {
    Tensor t({img.height, img.width, img.channels});
    for (std::size_t i = 0; i < img.pixels.size(); ++i) t.data[i] = static_cast<double>(img.pixels[i]) / 255.0;
    return t;
}

Tensor preprocess(const U8Image& img, const DatasetStats& stats) {
    if (static_cast<int>(stats.channel_mean.size()) != img.channels)
        throw DataError("statistics cover " + std::to_string(stats.channel_mean.size()) + " channels, image has " +
                        std::to_string(img.channels));
    Tensor t = to_unit_tensor(img);
    std::size_t ch = static_cast<std::size_t>(img.channels);
    for (std::size_t i = 0; i < t.data.size(); ++i) t.data[i] -= stats.channel_mean[i % ch];
    return t;
}

std::vector<TrainSample> prepare_training_data(const Corpus& corpus, const DatasetStats& stats) {
    corpus.validate();
    if (corpus.samples.empty()) throw DataError("corpus is empty");
    std::vector<TrainSample> out;
    out.reserve(corpus.samples.size());
    for (const auto& s : corpus.samples) out.push_back({preprocess(s.pixels, stats), s.label, s.id});
    return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw DataError("write to '" + path.string() + "' failed");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

void write_corpus_dir(const std::string& dir, const Corpus& corpus, const std::vector<std::string>& provenance) {
    corpus.validate();
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);

    int h = 0, w = 0, c = 0;
    if (!corpus.samples.empty()) {
        h = corpus.samples[0].pixels.height;
        w = corpus.samples[0].pixels.width;
        c = corpus.samples[0].pixels.channels;
    }
    std::size_t spurious = corpus.spurious_count();

    std::ostringstream manifest;
    manifest << "w2w-corpus 1\n";
    manifest << "samples " << corpus.samples.size() << "\n";
    manifest << "class_count " << corpus.class_count << "\n";
    manifest << "shape " << h << " " << w << " " << c << "\n";
    manifest << "meaningful " << (corpus.samples.size() - spurious) << "\n";
    manifest << "spurious " << spurious << "\n";
    if (!corpus.samples.empty()) {
        manifest << "spurious_fraction_of_total "
                 << format_double(static_cast<double>(spurious) / static_cast<double>(corpus.samples.size())) << "\n";
        std::size_t meaningful = corpus.samples.size() - spurious;
        if (meaningful > 0)
            manifest << "spurious_fraction_of_meaningful "
                     << format_double(static_cast<double>(spurious) / static_cast<double>(meaningful)) << "\n";
    }
    manifest << "provenance:\n";
    for (const auto& line : provenance) manifest << line << "\n";
    write_file(base / "manifest.txt", manifest.str());

    std::ostringstream csv;
    csv << "id,label,is_spurious,kind,original_label\n";
    for (const auto& s : corpus.samples) {
        csv << s.id << "," << s.label << "," << (s.meta.is_spurious ? 1 : 0) << "," << to_string(s.meta.kind) << ",";
        if (s.meta.original_label != 0) csv << s.meta.original_label;
        csv << "\n";
    }
    write_file(base / "samples.csv", csv.str());

    std::string blob;
    blob.reserve(corpus.samples.size() * static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                 static_cast<std::size_t>(c));
    for (const auto& s : corpus.samples)
        blob.append(reinterpret_cast<const char*>(s.pixels.pixels.data()), s.pixels.pixels.size());
    write_file(base / "pixels.u8", blob);
}

std::string read_manifest(const std::string& dir) {
    return read_file(std::filesystem::path(dir) / "manifest.txt");
}

Corpus read_corpus_dir(const std::string& dir) {
    const std::filesystem::path base(dir);
    std::vector<std::string> mlines = split_lines(read_file(base / "manifest.txt"));

    auto manifest_error = [&](const std::string& what) {
        return DataError("corpus manifest '" + (base / "manifest.txt").string() + "': " + what);
    };
    if (mlines.empty() || mlines[0] != "w2w-corpus 1") throw manifest_error("missing 'w2w-corpus 1' header");

    long long n_samples = -1, class_count = -1, h = -1, w = -1, c = -1;
    for (std::size_t i = 1; i < mlines.size(); ++i) {
        if (mlines[i] == "provenance:") break;
        std::vector<std::string> parts = split_fields(mlines[i], ' ');
        if (parts.size() == 2 && parts[0] == "samples") {
            if (!parse_i64(parts[1], n_samples)) throw manifest_error("bad samples line");
        } else if (parts.size() == 2 && parts[0] == "class_count") {
            if (!parse_i64(parts[1], class_count)) throw manifest_error("bad class_count line");
        } else if (parts.size() == 4 && parts[0] == "shape") {
            if (!parse_i64(parts[1], h) || !parse_i64(parts[2], w) || !parse_i64(parts[3], c))
                throw manifest_error("bad shape line");
        }
    }
    if (n_samples < 0) throw manifest_error("missing samples line");
    if (class_count < 0) throw manifest_error("missing class_count line");
    if (h < 0 || w < 0 || c < 0) throw manifest_error("missing shape line");

    std::vector<std::string> rows = split_lines(read_file(base / "samples.csv"));
    if (rows.empty() || rows[0] != "id,label,is_spurious,kind,original_label")
        throw DataError("corpus metadata '" + (base / "samples.csv").string() + "': missing header row");
    if (static_cast<long long>(rows.size()) - 1 != n_samples)
        throw DataError("corpus metadata row count " + std::to_string(rows.size() - 1) +
                        " does not match manifest samples " + std::to_string(n_samples));

    std::string blob = read_file(base / "pixels.u8");
    std::size_t per_image = static_cast<std::size_t>(h) * static_cast<std::size_t>(w) * static_cast<std::size_t>(c);
    if (blob.size() != per_image * static_cast<std::size_t>(n_samples))
        throw DataError("pixel blob '" + (base / "pixels.u8").string() + "': expected " +
                        std::to_string(per_image * static_cast<std::size_t>(n_samples)) + " bytes, got " +
                        std::to_string(blob.size()));

    Corpus corpus;
    corpus.class_count = static_cast<int>(class_count);
    corpus.samples.reserve(static_cast<std::size_t>(n_samples));
    for (long long i = 0; i < n_samples; ++i) {
        const std::string& row = rows[static_cast<std::size_t>(i) + 1];
        std::vector<std::string> f = split_fields(row, ',');
        if (f.size() != 5) throw DataError("corpus metadata row " + std::to_string(i + 1) + ": expected 5 fields");
        CorpusSample s;
        long long id = 0, label = 0, is_sp = 0, orig = 0;
        if (!parse_i64(f[0], id) || !parse_i64(f[1], label) || !parse_i64(f[2], is_sp))
            throw DataError("corpus metadata row " + std::to_string(i + 1) + ": malformed integer field");
        if (!f[4].empty() && !parse_i64(f[4], orig))
            throw DataError("corpus metadata row " + std::to_string(i + 1) + ": malformed original_label");
        s.id = id;
        s.label = static_cast<int>(label);
        s.meta.is_spurious = is_sp != 0;
        s.meta.kind = parse_corruption_kind(f[3]);
        s.meta.original_label = static_cast<int>(orig);
        s.pixels = U8Image(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
        const char* src = blob.data() + static_cast<std::size_t>(i) * per_image;
        std::copy(src, src + per_image, reinterpret_cast<char*>(s.pixels.pixels.data()));
        corpus.samples.push_back(std::move(s));
    }
    corpus.validate();
    return corpus;
}

} // namespace w2w
