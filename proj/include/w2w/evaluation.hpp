#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "w2w/inference.hpp"

namespace w2w {

// Removal quality of a cleansing mask against ground truth. A zero
// denominator leaves the rate 0 with its defined flag cleared.
struct CleansingMetrics {
    double sensitivity = 0.0; // flagged & spurious / spurious
    bool sensitivity_defined = false;
    double meaningful_removed = 0.0; // flagged & meaningful / meaningful
    bool meaningful_removed_defined = false;
    std::int64_t spurious_total = 0;
    std::int64_t spurious_flagged = 0;
    std::int64_t meaningful_total = 0;
    std::int64_t meaningful_flagged = 0;
};

// Sequences are aligned by position; DataError on length mismatch.
CleansingMetrics cleansing_metrics(const std::vector<std::uint8_t>& flagged,
                                   const std::vector<std::uint8_t>& ground_truth_spurious);

enum class AccuracyVariant { all_samples, confident_only };
const char* to_string(AccuracyVariant v);

// Per-class accuracy over the selected subset. Classes absent from the
// subset are undefined (excluded from mean/std, with a warning); mean
// and std (population convention) run over defined classes only.
struct AccuracyReport {
    AccuracyVariant variant = AccuracyVariant::all_samples;
    std::vector<double> per_class;          // size C, 0 where undefined
    std::vector<std::uint8_t> class_defined;
    std::vector<std::int64_t> class_total;
    std::vector<std::int64_t> class_correct;
    double mean = 0.0;
    double std_dev = 0.0;
    bool empty_subset = false; // the subset held no samples at all
    std::vector<std::string> warnings;
};

// tags may be empty for all_samples (the variant ignores them); for
// confident_only they must align with predicted/truth.
AccuracyReport accuracy_report(const std::vector<int>& predicted, const std::vector<int>& truth,
                               const std::vector<ConfidenceTag>& tags, int class_count,
                               AccuracyVariant variant);

// Nested key/value text, exact round-trip (doubles in shortest
// round-trip decimal form).
std::string format_metrics(const CleansingMetrics& m);
CleansingMetrics parse_metrics(const std::string& text);
std::string format_report(const AccuracyReport& r);
AccuracyReport parse_report(const std::string& text);

// Flat table: class,total,correct,accuracy,defined.
std::string report_csv(const AccuracyReport& r);

} // namespace w2w
