#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace nad::eval {

struct ScoredItem {
    std::string item_id;
    int label = 0;  // 1 abnormal (positive), 0 normal
    double score = 0.0;
};

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

// Probability that a random abnormal item outscores a random normal one, ties
// counting one half. Errors: SingleClass, ValidationFailed on non-finite scores.
double roc_auc(std::span<const ScoredItem> items);

// Items with score >= threshold are predicted abnormal.
Confusion confusion_at(std::span<const ScoredItem> items, double threshold);
// 2tp / (2tp + fp + fn); 0 when there are no positives at all.
double f1_score(const Confusion& c);

struct F1Result {
    double f1 = 0.0;
    double threshold = 0.0;
    Confusion confusion;
};

// Best F1 over every distinct score used as threshold; ties go to the lower threshold.
F1Result best_f1_sweep(std::span<const ScoredItem> items);

// Per-class counts over shared uniform bins spanning the pooled value range.
struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<int> classes;
    std::vector<std::vector<std::size_t>> counts;  // [class][bin]
};

// Bin 0 covers [edge_0, edge_1], bin i > 0 covers (edge_i, edge_{i+1}]. Errors:
// EmptyInput, InvalidArgument (bins < 2 or sizes differ).
Histogram histogram(std::span<const double> values, std::span<const int> labels, std::size_t bins);
// Merges adjacent bin pairs; bin count must be even.
Histogram merge_bin_pairs(const Histogram& h);
// Mean |residual| per image, the per-item value used for the pixel-difference histogram.
double mean_residual(std::span<const double> residual_map);

// Recall of the mask within the top_k highest-residual pixels (ties to the lower index).
// Errors: ShapeMismatch, EmptyMask.
double localization_overlap(std::span<const double> residual_map,
                            std::span<const std::uint8_t> truth_mask, std::size_t top_k);

struct EvalReport {
    std::size_t n_items = 0;
    std::size_t n_abnormal = 0;
    double auc = 0.0;
    F1Result best;
    Histogram score_histogram;
    Histogram residual_histogram;  // empty when residuals are unavailable
};

nlohmann::json to_json(const EvalReport& report);
// Header bin_lo,bin_hi,class,count, then one row per (class, bin).
std::string histogram_csv(const Histogram& h);

}  // namespace nad::eval
