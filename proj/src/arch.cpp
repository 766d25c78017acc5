#include "w2w/arch.hpp"

#include <sstream>

#include "w2w/errors.hpp"

namespace w2w {

std::vector<Dims> ArchSpec::layer_dims() const {
    if (layers.empty()) throw ConfigError("arch: no layers");
    if (class_count < 2) throw ConfigError("arch: class_count must be >= 2, got " + std::to_string(class_count));
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
        throw ConfigError("arch: dropout_rate must be in [0, 1), got " + std::to_string(dropout_rate));
    if (input.h < 1 || input.w < 1 || input.c < 1)
        throw ConfigError("arch: invalid input shape");

    std::vector<Dims> out;
    out.reserve(layers.size());
    Dims cur = input;
    bool flattened = false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        const std::string where = "arch: layer " + std::to_string(i);
        switch (l.kind) {
        case LayerKind::conv:
            if (flattened) throw ConfigError(where + ": conv after dense");
            if (l.filters < 1 || l.kernel < 1) throw ConfigError(where + ": bad conv shape");
            if (l.kernel > cur.h || l.kernel > cur.w)
                throw ConfigError(where + ": kernel " + std::to_string(l.kernel) + " exceeds input " +
                                  std::to_string(cur.h) + "x" + std::to_string(cur.w));
            cur = {cur.h - l.kernel + 1, cur.w - l.kernel + 1, l.filters};
            break;
        case LayerKind::pool:
            if (flattened) throw ConfigError(where + ": pool after dense");
            if (l.window < 1) throw ConfigError(where + ": bad pool window");
            if (l.window > cur.h || l.window > cur.w)
                throw ConfigError(where + ": pool window exceeds input");
            cur = {cur.h / l.window, cur.w / l.window, cur.c};
            break;
        case LayerKind::dense:
            if (l.units < 1) throw ConfigError(where + ": bad dense width");
            cur = {1, 1, l.units};
            flattened = true;
            break;
        }
        out.push_back(cur);
    }
    if (layers.back().kind != LayerKind::dense)
        throw ConfigError("arch: terminal layer must be dense");
    if (layers.back().units != class_count)
        throw ConfigError("arch: terminal dense width " + std::to_string(layers.back().units) +
                          " != class_count " + std::to_string(class_count));
    return out;
}

std::string ArchSpec::describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (i) os << " | ";
        const LayerSpec& l = layers[i];
        switch (l.kind) {
        case LayerKind::conv: os << "conv " << l.filters << " " << l.kernel; break;
        case LayerKind::pool: os << "pool " << l.window; break;
        case LayerKind::dense: os << "dense " << l.units; break;
        }
    }
    return os.str();
}

ArchSpec parse_arch(const std::string& text, double dropout_rate, int class_count, Dims input) {
    ArchSpec spec;
    spec.dropout_rate = dropout_rate;
    spec.class_count = class_count;
    spec.input = input;

    std::string part;
    std::istringstream stream(text);
    while (std::getline(stream, part, '|')) {
        std::istringstream ps(part);
        std::string kind;
        ps >> kind;
        if (kind.empty()) continue;
        if (kind == "conv") {
            int f = 0, k = 0;
            if (!(ps >> f >> k)) throw ConfigError("arch: expected 'conv <filters> <kernel>' in '" + part + "'");
            spec.layers.push_back(conv_layer(f, k));
        } else if (kind == "pool") {
            int w = 0;
            if (!(ps >> w)) throw ConfigError("arch: expected 'pool <window>' in '" + part + "'");
            spec.layers.push_back(pool_layer(w));
        } else if (kind == "dense") {
            int u = 0;
            if (!(ps >> u)) throw ConfigError("arch: expected 'dense <units>' in '" + part + "'");
            spec.layers.push_back(dense_layer(u));
        } else {
            throw ConfigError("arch: unknown layer kind '" + kind + "'");
        }
    }
    spec.validate();
    return spec;
}

ArchSpec default_arch(int class_count, Dims input) {
    ArchSpec spec;
    spec.layers = {conv_layer(8, 3), pool_layer(2), dense_layer(64), dense_layer(class_count)};
    spec.dropout_rate = 0.3;
    spec.class_count = class_count;
    spec.input = input;
    spec.validate();
    return spec;
}

} // namespace w2w
