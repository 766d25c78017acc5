#include "w2w/cleanser.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "w2w/errors.hpp"
#include "w2w/format.hpp"
#include "w2w/parallel.hpp"
#include "w2w/rng.hpp"
#include "w2w/signal.hpp"

namespace w2w {

namespace {

constexpr std::uint64_t kEpochTag = 0x45504F43ull; // "EPOC"
constexpr std::uint64_t kSweepTag = 0x53574550ull; // "SWEP"

WiseResult run_loop(const std::vector<TrainSample>& data, const ArchSpec& arch,
                    const TrainingConfig& train_cfg, const UncertaintyProvider& provider,
                    const CleanseConfig& ccfg, int workers) {
    if (data.empty()) throw DataError("run_wise: empty training set");
    train_cfg.validate();
    if (train_cfg.max_epochs < 40)
        throw ConfigError("run_wise: max_epochs must be >= 40 (stability needs a full std window), got " +
                          std::to_string(train_cfg.max_epochs));

    WiseResult res;
    res.params = init_model(arch, train_cfg.seed);

    ClusterAssignment last_assignment;
    for (int epoch = 1; epoch <= train_cfg.max_epochs; ++epoch) {
        const std::uint64_t epoch_seed = mix_seed(train_cfg.seed, {kEpochTag, static_cast<std::uint64_t>(epoch)});
        const double loss = sgd_epoch(res.params, data, train_cfg, epoch_seed, workers);

        std::vector<double> u = provider(epoch, res.params);
        if (u.size() != data.size())
            throw DataError("run_wise: sweep returned " + std::to_string(u.size()) +
                            " values for " + std::to_string(data.size()) + " samples");
        for (double v : u)
            if (!std::isfinite(v) || v < 0.0)
                throw NumericError("run_wise: invalid uncertainty value at epoch " + std::to_string(epoch));

        last_assignment = kmeans2_1d(u);
        res.final_uncertainties = std::move(u);

        res.signal.raw.push_back(delta_value(last_assignment));
        res.signal.filtered = median_filter(res.signal.raw, ccfg.filter_window);
        res.signal.std_series = sliding_std(res.signal.filtered, ccfg.std_window, ccfg.std_stride);

        WiseEpochLog row;
        row.epoch = epoch;
        row.mean_loss = loss;
        row.delta = res.signal.raw.back();
        row.filtered_delta = res.signal.filtered.back();
        row.have_std = !res.signal.std_series.empty();
        row.latest_std = row.have_std ? res.signal.std_series.back() : 0.0;
        row.n_low = last_assignment.count(ClusterAssignment::low);
        row.n_high = last_assignment.count(ClusterAssignment::high);
        row.centroid_low = last_assignment.centroid_low;
        row.centroid_high = last_assignment.centroid_high;
        res.log.push_back(row);

        res.outcome.stop_epoch = epoch;
        if (should_stop(res.signal.std_series, ccfg.std_threshold)) {
            res.outcome.stopped_by = StopReason::stability;
            break;
        }
        res.outcome.stopped_by = StopReason::max_epochs;
    }

    res.outcome.u_threshold = last_assignment.centroid_high;
    res.outcome.spurious_mask.assign(data.size(), 0);
    for (std::size_t i = 0; i < data.size(); ++i)
        res.outcome.spurious_mask[i] = last_assignment.labels[i] == ClusterAssignment::high;
    return res;
}

} // namespace

std::string to_string(StopReason r) {
    return r == StopReason::stability ? "stability" : "max_epochs";
}

std::vector<double> uncertainty_sweep(const ModelParameters& params,
                                      const std::vector<TrainSample>& data,
                                      const McConfig& mc_cfg, int epoch, int workers) {
    mc_cfg.validate();
    const std::size_t n = data.size();
    std::vector<double> u(n);
    // chunk just to amortize evaluator setup; each slot is written
    // independently so any schedule gives the same vector
    constexpr std::size_t kChunk = 64;
    const std::size_t nchunks = (n + kChunk - 1) / kChunk;
    parallel_for(nchunks, workers, [&](std::size_t c) {
        Evaluator eval(params);
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) {
            McConfig per = mc_cfg;
            per.base_seed = mix_seed(mc_cfg.base_seed,
                                     {kSweepTag, static_cast<std::uint64_t>(epoch),
                                      static_cast<std::uint64_t>(data[i].id)});
            try {
                u[i] = total_uncertainty(decompose(mc_predict(eval, data[i].x, per)));
            } catch (const NumericError& e) {
                throw NumericError("sweep sample id " + std::to_string(data[i].id) + ": " + e.what());
            }
        }
    });
    return u;
}

WiseResult run_wise(const std::vector<TrainSample>& data, const ArchSpec& arch,
                    const TrainingConfig& train_cfg, const McConfig& mc_cfg,
                    const CleanseConfig& cleanse_cfg, int workers) {
    mc_cfg.validate();
    auto provider = [&](int epoch, const ModelParameters& params) {
        return uncertainty_sweep(params, data, mc_cfg, epoch, workers);
    };
    return run_loop(data, arch, train_cfg, provider, cleanse_cfg, workers);
}

WiseResult run_wise_with_provider(const std::vector<TrainSample>& data, const ArchSpec& arch,
                                  const TrainingConfig& train_cfg,
                                  const UncertaintyProvider& provider,
                                  const CleanseConfig& cleanse_cfg, int workers) {
    return run_loop(data, arch, train_cfg, provider, cleanse_cfg, workers);
}

void write_outcome(std::ostream& out, const CleansingOutcome& outcome,
                   const std::vector<std::int64_t>& ids) {
    if (ids.size() != outcome.spurious_mask.size())
        throw DataError("write_outcome: " + std::to_string(ids.size()) + " ids vs mask of " +
                        std::to_string(outcome.spurious_mask.size()));
    std::size_t spurious = 0;
    for (auto m : outcome.spurious_mask) spurious += m != 0;
    out << "u_threshold " << format_double(outcome.u_threshold) << '\n';
    out << "stop_epoch " << outcome.stop_epoch << '\n';
    out << "stopped_by " << to_string(outcome.stopped_by) << '\n';
    out << "total " << ids.size() << '\n';
    out << "spurious " << spurious << '\n';
    out << "---\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (outcome.spurious_mask[i]) out << ids[i] << '\n';
}

LoadedOutcome read_outcome(std::istream& in) {
    LoadedOutcome out;
    bool saw_threshold = false, saw_epoch = false, saw_reason = false, saw_total = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line == "---") break;
        std::istringstream ls(line);
        std::string key, value;
        if (!(ls >> key >> value)) throw DataError("outcome file: malformed line '" + line + "'");
        if (key == "u_threshold") {
            if (!parse_double(value, out.u_threshold))
                throw DataError("outcome file: bad u_threshold '" + value + "'");
            saw_threshold = true;
        } else if (key == "stop_epoch") {
            long long v = 0;
            if (!parse_i64(value, v)) throw DataError("outcome file: bad stop_epoch '" + value + "'");
            out.stop_epoch = static_cast<int>(v);
            saw_epoch = true;
        } else if (key == "stopped_by") {
            if (value == "stability")
                out.stopped_by = StopReason::stability;
            else if (value == "max_epochs")
                out.stopped_by = StopReason::max_epochs;
            else
                throw DataError("outcome file: unknown stop reason '" + value + "'");
            saw_reason = true;
        } else if (key == "total") {
            long long v = 0;
            if (!parse_i64(value, v) || v < 0) throw DataError("outcome file: bad total '" + value + "'");
            out.total = static_cast<std::size_t>(v);
            saw_total = true;
        } else if (key == "spurious") {
            // count is redundant with the id list; ignored on read
        } else {
            throw DataError("outcome file: unknown key '" + key + "'");
        }
    }
    if (!saw_threshold || !saw_epoch || !saw_reason || !saw_total)
        throw DataError("outcome file: missing required fields");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        long long id = 0;
        if (!parse_i64(line, id)) throw DataError("outcome file: bad id line '" + line + "'");
        out.spurious_ids.push_back(id);
    }
    return out;
}

void write_wise_log(std::ostream& out, const std::vector<WiseEpochLog>& log) {
    out << "epoch,loss,delta,filtered,std,n_low,n_high,centroid_low,centroid_high\n";
    for (const auto& row : log) {
        out << row.epoch << ',' << format_double(row.mean_loss) << ',' << format_double(row.delta)
            << ',' << format_double(row.filtered_delta) << ',';
        if (row.have_std) out << format_double(row.latest_std);
        out << ',' << row.n_low << ',' << row.n_high << ',' << format_double(row.centroid_low)
            << ',' << format_double(row.centroid_high) << '\n';
    }
}

} // namespace w2w
