#include "w2w/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "w2w/errors.hpp"
#include "w2w/image.hpp"
#include "w2w/rng.hpp"

namespace w2w {

namespace {

constexpr std::uint64_t kBlobTag = 0x424C4F42;    // "BLOB"
constexpr std::uint64_t kNoiseTag = 0x5354524E;   // "STRN"
constexpr std::uint64_t kAlienTag = 0x414C494E;   // "ALIN"
constexpr std::uint64_t kSymTag = 0x53594D46;     // "SYMF"
constexpr std::uint64_t kPairTag = 0x50414952;    // "PAIR"
constexpr std::uint64_t kDegradeTag = 0x44454752; // "DEGR"

constexpr int kBlurKernel = 11;
constexpr double kPi = 3.141592653589793238462643383279;

void check_fraction(double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw ConfigError("corruption fraction must lie in [0, 1], got " + std::to_string(fraction));
}

std::uint8_t clamp_u8(double v) {
    double r = std::floor(v + 0.5);
    if (r < 0.0) return 0;
    if (r > 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

// First k entries of a Fisher-Yates shuffle of [0, n); result order is
// the selection order.
std::vector<std::size_t> choose_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

std::vector<std::size_t> select_sorted(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> chosen = choose_without_replacement(n, k, rng);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

} // namespace

std::int64_t corruption_count(double fraction, std::size_t n) {
    check_fraction(fraction);
    return static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

Corpus synth_gaussians(int n_per_class, int class_count, int image_side, double separation, std::uint64_t seed) {
    if (n_per_class < 1) throw ConfigError("synth_gaussians needs n_per_class >= 1");
    if (class_count < 1) throw ConfigError("synth_gaussians needs class_count >= 1");
    if (image_side < 2) throw ConfigError("synth_gaussians needs image_side >= 2");
    if (!(separation > 0.0)) throw ConfigError("synth_gaussians needs separation > 0");

    double mid = (image_side - 1) / 2.0;
    double sigma = image_side / 8.0;
    Corpus corpus;
    corpus.class_count = class_count;
    corpus.samples.reserve(static_cast<std::size_t>(n_per_class) * static_cast<std::size_t>(class_count));
    for (int c = 1; c <= class_count; ++c) {
        double angle = 2.0 * kPi * (c - 1) / class_count;
        double cy = mid + separation * std::sin(angle);
        double cx = mid + separation * std::cos(angle);
        for (int i = 0; i < n_per_class; ++i) {
            Rng rng(mix_seed(seed, {kBlobTag, static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(i)}));
            double jy = cy + rng.normal(0.0, 0.7);
            double jx = cx + rng.normal(0.0, 0.7);
            CorpusSample s;
            s.id = static_cast<std::int64_t>(c - 1) * n_per_class + i;
            s.label = c;
            s.pixels = U8Image(image_side, image_side, 1);
            for (int y = 0; y < image_side; ++y)
                for (int x = 0; x < image_side; ++x) {
                    double d2 = (y - jy) * (y - jy) + (x - jx) * (x - jx);
                    double v = 220.0 * std::exp(-d2 / (2.0 * sigma * sigma)) + rng.normal(0.0, 12.0);
                    s.pixels.at(y, x, 0) = clamp_u8(v);
                }
            corpus.samples.push_back(std::move(s));
        }
    }
    return corpus;
}

Corpus synth_structured_noise(int n, int image_side, int channels, std::uint64_t seed) {
    if (n < 0) throw ConfigError("synth_structured_noise needs n >= 0");
    if (image_side < 2) throw ConfigError("synth_structured_noise needs image_side >= 2");
    if (channels < 1) throw ConfigError("synth_structured_noise needs channels >= 1");

    Corpus corpus;
    corpus.class_count = 1;
    corpus.samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, {kNoiseTag, static_cast<std::uint64_t>(i)}));
        double theta = rng.uniform(0.0, kPi);
        double freq = rng.uniform(1.0, 4.0);
        double phase = rng.uniform(0.0, 2.0 * kPi);
        double amp = rng.uniform(60.0, 110.0);
        double ct = std::cos(theta), st = std::sin(theta);
        CorpusSample s;
        s.id = i;
        s.label = 1;
        s.pixels = U8Image(image_side, image_side, channels);
        for (int y = 0; y < image_side; ++y)
            for (int x = 0; x < image_side; ++x) {
                double wave = 127.5 + amp * std::sin(2.0 * kPi * freq * (x * ct + y * st) / image_side + phase);
                for (int c = 0; c < channels; ++c) s.pixels.at(y, x, c) = clamp_u8(wave + rng.normal(0.0, 10.0));
            }
        corpus.samples.push_back(std::move(s));
    }
    return corpus;
}

Corpus inject_alien(const Corpus& base, const Corpus& alien_pool, double fraction, std::uint64_t seed) {
    base.validate();
    alien_pool.validate();
    std::int64_t k = corruption_count(fraction, base.size());
    if (static_cast<std::int64_t>(alien_pool.size()) < k)
        throw DataError("alien pool has " + std::to_string(alien_pool.size()) + " samples, need " + std::to_string(k));
    if (k > 0 && base.class_count < 1) throw DataError("alien injection needs base class_count >= 1");
    if (k > 0 && !base.samples.empty() && !same_shape(base.samples[0].pixels, alien_pool.samples[0].pixels))
        throw DataError("alien pool image shape differs from base corpus");

    Corpus out = base;
    Rng rng(mix_seed(seed, {kAlienTag}));
    std::vector<std::size_t> chosen = choose_without_replacement(alien_pool.size(), static_cast<std::size_t>(k), rng);
    std::int64_t next_id = base.max_id() + 1;
    for (std::size_t pi : chosen) {
        CorpusSample s;
        s.id = next_id++;
        s.pixels = alien_pool.samples[pi].pixels;
        s.label = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(base.class_count)));
        s.meta.is_spurious = true;
        s.meta.kind = CorruptionKind::alien;
        out.samples.push_back(std::move(s));
    }
    return out;
}

Corpus flip_symmetric(const Corpus& corpus, double fraction, std::uint64_t seed) {
    corpus.validate();
    if (corpus.class_count < 2) throw ConfigError("symmetric flips need class_count >= 2");
    std::int64_t k = corruption_count(fraction, corpus.size());
    Corpus out = corpus;
    Rng rng(mix_seed(seed, {kSymTag}));
    for (std::size_t idx : select_sorted(corpus.size(), static_cast<std::size_t>(k), rng)) {
        CorpusSample& s = out.samples[idx];
        int old = s.label;
        // Uniform over the C-1 other labels.
        int u = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(corpus.class_count - 1)));
        s.label = u < old ? u : u + 1;
        s.meta.is_spurious = true;
        s.meta.kind = CorruptionKind::sym_flip;
        if (s.meta.original_label == 0) s.meta.original_label = old;
    }
    return out;
}

Corpus flip_pair(const Corpus& corpus, double fraction, std::uint64_t seed) {
    corpus.validate();
    if (corpus.class_count < 2) throw ConfigError("pair flips need class_count >= 2");
    std::int64_t k = corruption_count(fraction, corpus.size());
    Corpus out = corpus;
    Rng rng(mix_seed(seed, {kPairTag}));
    for (std::size_t idx : select_sorted(corpus.size(), static_cast<std::size_t>(k), rng)) {
        CorpusSample& s = out.samples[idx];
        int old = s.label;
        s.label = (old % corpus.class_count) + 1;
        s.meta.is_spurious = true;
        s.meta.kind = CorruptionKind::pair_flip;
        if (s.meta.original_label == 0) s.meta.original_label = old;
    }
    return out;
}

Corpus degrade(const Corpus& corpus, double fraction, const std::vector<CorruptionKind>& kinds, std::uint64_t seed) {
    corpus.validate();
    if (kinds.empty()) throw ConfigError("degrade needs at least one kind");
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        if (kinds[i] != CorruptionKind::blur && kinds[i] != CorruptionKind::crop && kinds[i] != CorruptionKind::scale)
            throw ConfigError(std::string("degrade accepts blur/crop/scale, got '") + to_string(kinds[i]) + "'");
        for (std::size_t j = i + 1; j < kinds.size(); ++j)
            if (kinds[i] == kinds[j]) throw ConfigError(std::string("duplicate degradation kind '") + to_string(kinds[i]) + "'");
    }
    bool wants_blur = std::find(kinds.begin(), kinds.end(), CorruptionKind::blur) != kinds.end();
    if (wants_blur && !corpus.samples.empty() &&
        (corpus.samples[0].pixels.height < kBlurKernel || corpus.samples[0].pixels.width < kBlurKernel))
        throw ConfigError("blur requested but images are " + std::to_string(corpus.samples[0].pixels.height) + "x" +
                          std::to_string(corpus.samples[0].pixels.width) + ", smaller than the " +
                          std::to_string(kBlurKernel) + "x" + std::to_string(kBlurKernel) + " median window");

    std::int64_t k = corruption_count(fraction, corpus.size());
    Corpus out = corpus;
    Rng rng(mix_seed(seed, {kDegradeTag}));
    std::vector<std::size_t> chosen = select_sorted(corpus.size(), static_cast<std::size_t>(k), rng);
    for (std::size_t j = 0; j < chosen.size(); ++j) {
        CorpusSample& s = out.samples[chosen[j]];
        CorruptionKind kind = kinds[j % kinds.size()];
        if (kind == CorruptionKind::blur) {
            s.pixels = median_blur(s.pixels, kBlurKernel);
        } else if (kind == CorruptionKind::crop) {
            double f = rng.uniform(0.5, 0.9);
            int ch = std::max(1, static_cast<int>(std::floor(f * s.pixels.height + 0.5)));
            int cw = std::max(1, static_cast<int>(std::floor(f * s.pixels.width + 0.5)));
            int top = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(s.pixels.height - ch + 1)));
            int left = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(s.pixels.width - cw + 1)));
            s.pixels = crop_and_resize(s.pixels, top, left, ch, cw);
        } else {
            s.pixels = rescale_keep_shape(s.pixels, rng.uniform(0.5, 1.5));
        }
        s.meta.is_spurious = true;
        s.meta.kind = kind;
    }
    return out;
}

} // namespace w2w
