#include "w2w/uncertainty.hpp"

#include <string>

#include "w2w/errors.hpp"
#include "w2w/format.hpp"
#include "w2w/rng.hpp"

namespace w2w {

void McConfig::validate() const {
    if (passes < 2)
        throw ConfigError("mc: passes must be >= 2 for a variance, got " + std::to_string(passes));
}

McSample mc_predict(Evaluator& eval, const Tensor& x, const McConfig& cfg) {
    cfg.validate();
    McSample out;
    out.passes.reserve(static_cast<std::size_t>(cfg.passes));
    for (int t = 0; t < cfg.passes; ++t) {
        Rng rng(mix_seed(cfg.base_seed, {static_cast<std::uint64_t>(t)}));
        try {
            out.passes.push_back(eval.probabilities(x, &rng));
        } catch (const NumericError& e) {
            throw NumericError("mc pass " + std::to_string(t) + ": " + e.what());
        }
    }
    return out;
}

McSample mc_predict(const ModelParameters& params, const Tensor& x, const McConfig& cfg) {
    Evaluator eval(params);
    return mc_predict(eval, x, cfg);
}

UncertaintyRecord decompose(const McSample& s) {
    const std::size_t T = s.passes.size();
    if (T < 2) throw DataError("decompose: need >= 2 passes, got " + std::to_string(T));
    const std::size_t C = s.passes.front().size();
    if (C < 2) throw DataError("decompose: class dimension must be >= 2");
    for (const auto& p : s.passes) {
        if (p.size() != C) throw DataError("decompose: ragged pass lengths");
        if (!is_probability_vector(p)) throw DataError("decompose: pass is not a probability vector");
    }

    UncertaintyRecord r;
    r.aleatoric = Tensor({static_cast<int>(C), static_cast<int>(C)});
    r.epistemic = Tensor({static_cast<int>(C), static_cast<int>(C)});

    std::vector<double> mean(C, 0.0);
    for (const auto& p : s.passes)
        for (std::size_t i = 0; i < C; ++i) mean[i] += p[i];
    for (double& m : mean) m /= static_cast<double>(T);

    for (const auto& p : s.passes) {
        for (std::size_t i = 0; i < C; ++i) {
            const double di = p[i] - mean[i];
            for (std::size_t j = 0; j < C; ++j) {
                r.aleatoric.data[i * C + j] += (i == j ? p[i] : 0.0) - p[i] * p[j];
                r.epistemic.data[i * C + j] += di * (p[j] - mean[j]);
            }
        }
    }
    const double inv_t = 1.0 / static_cast<double>(T);
    for (double& v : r.aleatoric.data) v *= inv_t;
    for (double& v : r.epistemic.data) v *= inv_t;

    r.total = 0.0;
    for (std::size_t i = 0; i < C; ++i)
        r.total += r.aleatoric.data[i * C + i] + r.epistemic.data[i * C + i];
    return r;
}

double total_uncertainty(const UncertaintyRecord& r) {
    const int c = r.aleatoric.shape.at(0);
    double t = 0.0;
    for (int i = 0; i < c; ++i)
        t += r.aleatoric.data[static_cast<std::size_t>(i) * c + i] +
             r.epistemic.data[static_cast<std::size_t>(i) * c + i];
    return t;
}

void write_uncertainty_rows(std::ostream& out, const std::vector<std::int64_t>& ids,
                            const std::vector<UncertaintyRecord>& records) {
    if (ids.size() != records.size())
        throw DataError("uncertainty rows: " + std::to_string(ids.size()) + " ids vs " +
                        std::to_string(records.size()) + " records");
    out << "id,aleatoric,epistemic,total\n";
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const auto& r = records[k];
        const int c = r.aleatoric.shape.at(0);
        double ta = 0.0, te = 0.0;
        for (int i = 0; i < c; ++i) {
            ta += r.aleatoric.data[static_cast<std::size_t>(i) * c + i];
            te += r.epistemic.data[static_cast<std::size_t>(i) * c + i];
        }
        out << ids[k] << ',' << format_double(ta) << ',' << format_double(te) << ','
            << format_double(r.total) << '\n';
    }
}

} // namespace w2w
