#include "w2w/evaluation.hpp"

#include <cmath>
#include <sstream>

#include "w2w/errors.hpp"
#include "w2w/format.hpp"

namespace w2w {

CleansingMetrics cleansing_metrics(const std::vector<std::uint8_t>& flagged,
                                   const std::vector<std::uint8_t>& ground_truth_spurious) {
    if (flagged.size() != ground_truth_spurious.size())
        throw DataError("cleansing_metrics: flagged has " + std::to_string(flagged.size()) +
                        " entries, ground truth has " + std::to_string(ground_truth_spurious.size()));
    CleansingMetrics m;
    for (std::size_t i = 0; i < flagged.size(); ++i) {
        bool f = flagged[i] != 0;
        if (ground_truth_spurious[i] != 0) {
            ++m.spurious_total;
            if (f) ++m.spurious_flagged;
        } else {
            ++m.meaningful_total;
            if (f) ++m.meaningful_flagged;
        }
    }
    if (m.spurious_total > 0) {
        m.sensitivity = static_cast<double>(m.spurious_flagged) / static_cast<double>(m.spurious_total);
        m.sensitivity_defined = true;
    }
    if (m.meaningful_total > 0) {
        m.meaningful_removed = static_cast<double>(m.meaningful_flagged) / static_cast<double>(m.meaningful_total);
        m.meaningful_removed_defined = true;
    }
    return m;
}

const char* to_string(AccuracyVariant v) {
    return v == AccuracyVariant::all_samples ? "all_samples" : "confident_only";
}

AccuracyReport accuracy_report(const std::vector<int>& predicted, const std::vector<int>& truth,
                               const std::vector<ConfidenceTag>& tags, int class_count,
                               AccuracyVariant variant) {
    if (class_count < 1) throw ConfigError("accuracy_report needs class_count >= 1");
    if (predicted.size() != truth.size())
        throw DataError("accuracy_report: " + std::to_string(predicted.size()) + " predictions vs " +
                        std::to_string(truth.size()) + " truths");
    bool use_tags = variant == AccuracyVariant::confident_only;
    if (use_tags && tags.size() != predicted.size())
        throw DataError("accuracy_report: confident_only needs one tag per sample, got " +
                        std::to_string(tags.size()));

    AccuracyReport r;
    r.variant = variant;
    std::size_t c = static_cast<std::size_t>(class_count);
    r.per_class.assign(c, 0.0);
    r.class_defined.assign(c, 0);
    r.class_total.assign(c, 0);
    r.class_correct.assign(c, 0);

    std::size_t in_subset = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (truth[i] < 1 || truth[i] > class_count)
            throw DataError("accuracy_report: truth label " + std::to_string(truth[i]) + " outside [1, " +
                            std::to_string(class_count) + "]");
        if (predicted[i] < 1 || predicted[i] > class_count)
            throw DataError("accuracy_report: predicted label " + std::to_string(predicted[i]) + " outside [1, " +
                            std::to_string(class_count) + "]");
        if (use_tags && tags[i] != ConfidenceTag::confident) continue;
        ++in_subset;
        std::size_t k = static_cast<std::size_t>(truth[i] - 1);
        ++r.class_total[k];
        if (predicted[i] == truth[i]) ++r.class_correct[k];
    }

    double sum = 0.0;
    int defined = 0;
    for (std::size_t k = 0; k < c; ++k) {
        if (r.class_total[k] > 0) {
            r.per_class[k] = static_cast<double>(r.class_correct[k]) / static_cast<double>(r.class_total[k]);
            r.class_defined[k] = 1;
            sum += r.per_class[k];
            ++defined;
        } else {
            r.warnings.push_back("class " + std::to_string(k + 1) + " has no samples in the " +
                                 std::string(to_string(variant)) + " subset");
        }
    }
    if (in_subset == 0) {
        r.empty_subset = true;
        r.warnings.push_back(std::string(to_string(variant)) + " subset is empty");
    }
    if (defined > 0) {
        r.mean = sum / defined;
        double ss = 0.0;
        for (std::size_t k = 0; k < c; ++k)
            if (r.class_defined[k]) {
                double d = r.per_class[k] - r.mean;
                ss += d * d;
            }
        r.std_dev = std::sqrt(ss / defined); // population convention
    }
    return r;
}

std::string format_metrics(const CleansingMetrics& m) {
    std::ostringstream out;
    out << "cleansing_metrics:\n";
    out << "  sensitivity " << format_double(m.sensitivity) << "\n";
    out << "  sensitivity_defined " << (m.sensitivity_defined ? 1 : 0) << "\n";
    out << "  meaningful_removed " << format_double(m.meaningful_removed) << "\n";
    out << "  meaningful_removed_defined " << (m.meaningful_removed_defined ? 1 : 0) << "\n";
    out << "  spurious_total " << m.spurious_total << "\n";
    out << "  spurious_flagged " << m.spurious_flagged << "\n";
    out << "  meaningful_total " << m.meaningful_total << "\n";
    out << "  meaningful_flagged " << m.meaningful_flagged << "\n";
    return out.str();
}

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

// "  key rest-of-line" -> (key, rest)
bool split_kv(const std::string& line, std::string& key, std::string& rest) {
    if (line.size() < 3 || line[0] != ' ' || line[1] != ' ') return false;
    std::size_t sp = line.find(' ', 2);
    if (sp == std::string::npos) {
        key = line.substr(2);
        rest.clear();
    } else {
        key = line.substr(2, sp - 2);
        rest = line.substr(sp + 1);
    }
    return true;
}

double need_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    if (!parse_double(s, v)) throw DataError("report parse: bad " + what + " value '" + s + "'");
    return v;
}

long long need_int(const std::string& s, const std::string& what) {
    long long v = 0;
    if (!parse_i64(s, v)) throw DataError("report parse: bad " + what + " value '" + s + "'");
    return v;
}

} // namespace

CleansingMetrics parse_metrics(const std::string& text) {
    std::vector<std::string> lines = lines_of(text);
    if (lines.empty() || lines[0] != "cleansing_metrics:")
        throw DataError("report parse: missing 'cleansing_metrics:' header");
    CleansingMetrics m;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string key, rest;
        if (!split_kv(lines[i], key, rest)) throw DataError("report parse: malformed line '" + lines[i] + "'");
        if (key == "sensitivity") m.sensitivity = need_double(rest, key);
        else if (key == "sensitivity_defined") m.sensitivity_defined = need_int(rest, key) != 0;
        else if (key == "meaningful_removed") m.meaningful_removed = need_double(rest, key);
        else if (key == "meaningful_removed_defined") m.meaningful_removed_defined = need_int(rest, key) != 0;
        else if (key == "spurious_total") m.spurious_total = need_int(rest, key);
        else if (key == "spurious_flagged") m.spurious_flagged = need_int(rest, key);
        else if (key == "meaningful_total") m.meaningful_total = need_int(rest, key);
        else if (key == "meaningful_flagged") m.meaningful_flagged = need_int(rest, key);
        else throw DataError("report parse: unknown key '" + key + "'");
    }
    return m;
}

std::string format_report(const AccuracyReport& r) {
    std::ostringstream out;
    out << "accuracy_report:\n";
    out << "  variant " << to_string(r.variant) << "\n";
    out << "  classes " << r.per_class.size() << "\n";
    for (std::size_t k = 0; k < r.per_class.size(); ++k)
        out << "  class " << (k + 1) << " total " << r.class_total[k] << " correct " << r.class_correct[k]
            << " accuracy " << format_double(r.per_class[k]) << " defined " << (r.class_defined[k] ? 1 : 0) << "\n";
    out << "  mean " << format_double(r.mean) << "\n";
    out << "  std_dev " << format_double(r.std_dev) << "\n";
    out << "  empty_subset " << (r.empty_subset ? 1 : 0) << "\n";
    for (const auto& w : r.warnings) out << "  warning " << w << "\n";
    return out.str();
}

AccuracyReport parse_report(const std::string& text) {
    std::vector<std::string> lines = lines_of(text);
    if (lines.empty() || lines[0] != "accuracy_report:")
        throw DataError("report parse: missing 'accuracy_report:' header");
    AccuracyReport r;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::string key, rest;
        if (!split_kv(lines[i], key, rest)) throw DataError("report parse: malformed line '" + lines[i] + "'");
        if (key == "variant") {
            if (rest == "all_samples") r.variant = AccuracyVariant::all_samples;
            else if (rest == "confident_only") r.variant = AccuracyVariant::confident_only;
            else throw DataError("report parse: unknown variant '" + rest + "'");
        } else if (key == "classes") {
            std::size_t c = static_cast<std::size_t>(need_int(rest, key));
            r.per_class.assign(c, 0.0);
            r.class_defined.assign(c, 0);
            r.class_total.assign(c, 0);
            r.class_correct.assign(c, 0);
        } else if (key == "class") {
            std::istringstream ss(rest);
            long long idx = 0, total = 0, correct = 0, defined = 0;
            std::string w1, w2, w3, w4;
            double acc = 0.0;
            std::string acc_text;
            ss >> idx >> w1 >> total >> w2 >> correct >> w3 >> acc_text >> w4 >> defined;
            if (!ss || w1 != "total" || w2 != "correct" || w3 != "accuracy" || w4 != "defined")
                throw DataError("report parse: malformed class line '" + rest + "'");
            acc = need_double(acc_text, "accuracy");
            if (idx < 1 || static_cast<std::size_t>(idx) > r.per_class.size())
                throw DataError("report parse: class index " + std::to_string(idx) + " out of range");
            std::size_t k = static_cast<std::size_t>(idx - 1);
            r.class_total[k] = total;
            r.class_correct[k] = correct;
            r.per_class[k] = acc;
            r.class_defined[k] = defined != 0;
        } else if (key == "mean") {
            r.mean = need_double(rest, key);
        } else if (key == "std_dev") {
            r.std_dev = need_double(rest, key);
        } else if (key == "empty_subset") {
            r.empty_subset = need_int(rest, key) != 0;
        } else if (key == "warning") {
            r.warnings.push_back(rest);
        } else {
            throw DataError("report parse: unknown key '" + key + "'");
        }
    }
    return r;
}

std::string report_csv(const AccuracyReport& r) {
    std::ostringstream out;
    out << "class,total,correct,accuracy,defined\n";
    for (std::size_t k = 0; k < r.per_class.size(); ++k)
        out << (k + 1) << "," << r.class_total[k] << "," << r.class_correct[k] << ","
            << format_double(r.per_class[k]) << "," << (r.class_defined[k] ? 1 : 0) << "\n";
    return out.str();
}

} // namespace w2w
