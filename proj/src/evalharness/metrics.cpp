#include "nad/evalharness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "nad/error.hpp"

namespace nad::eval {

namespace {

void require_both_classes(std::span<const ScoredItem> items) {
    bool pos = false, neg = false;
    for (const auto& it : items) {
        if (!std::isfinite(it.score)) throw Error(Errc::validation_failed, "score of " + it.item_id + " is not finite");
        if (it.label != 0 && it.label != 1) throw Error(Errc::validation_failed, "labels must be 0 or 1");
        (it.label == 1 ? pos : neg) = true;
    }
    if (!pos || !neg) throw Error(Errc::single_class, "both normal and abnormal items are required");
}

std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double roc_auc(std::span<const ScoredItem> items) {
    require_both_classes(items);
    std::vector<double> normal, abnormal;
    for (const auto& it : items) (it.label == 1 ? abnormal : normal).push_back(it.score);
    std::ranges::sort(normal);
    // Twice the Mann-Whitney U, kept integral so ties are exact.
    std::uint64_t twice_u = 0;
    for (double a : abnormal) {
        const auto lo = std::ranges::lower_bound(normal, a) - normal.begin();
        const auto hi = std::ranges::upper_bound(normal, a) - normal.begin();
        twice_u += 2 * static_cast<std::uint64_t>(lo) + static_cast<std::uint64_t>(hi - lo);
    }
    return static_cast<double>(twice_u) /
           (2.0 * static_cast<double>(normal.size()) * static_cast<double>(abnormal.size()));
}

Confusion confusion_at(std::span<const ScoredItem> items, double threshold) {
    Confusion c;
    for (const auto& it : items) {
        const bool predicted = it.score >= threshold;
        if (it.label == 1) {
            ++(predicted ? c.tp : c.fn);
        } else {
            ++(predicted ? c.fp : c.tn);
        }
    }
    return c;
}

double f1_score(const Confusion& c) {
    const std::size_t denom = 2 * c.tp + c.fp + c.fn;
    return denom == 0 ? 0.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

F1Result best_f1_sweep(std::span<const ScoredItem> items) {
    require_both_classes(items);
    std::vector<ScoredItem> sorted(items.begin(), items.end());
    std::ranges::sort(sorted, std::ranges::greater{}, &ScoredItem::score);
    std::size_t positives = 0;
    for (const auto& it : sorted) positives += it.label == 1;

    F1Result best;
    bool have = false;
    Confusion c{0, 0, sorted.size() - positives, positives};
    for (std::size_t i = 0; i < sorted.size();) {
        const double t = sorted[i].score;
        for (; i < sorted.size() && sorted[i].score == t; ++i) {
            if (sorted[i].label == 1) {
                ++c.tp;
                --c.fn;
            } else {
                ++c.fp;
                --c.tn;
            }
        }
        const double f = f1_score(c);
        // Thresholds descend, so >= moves ties toward the lower threshold.
        if (!have || f >= best.f1) {
            best = {f, t, c};
            have = true;
        }
    }
    return best;
}

Histogram histogram(std::span<const double> values, std::span<const int> labels, std::size_t bins) {
    if (values.empty()) throw Error(Errc::empty_input, "histogram of no values");
    if (bins < 2) throw Error(Errc::invalid_argument, "histogram needs at least 2 bins");
    if (values.size() != labels.size()) throw Error(Errc::invalid_argument, "values and labels differ in size");
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(Errc::validation_failed, "histogram value is not finite");
    }
    const auto [mn, mx] = std::ranges::minmax(values);
    Histogram h;
    const double range = mx - mn;
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges.push_back(i == bins ? mx : mn + range * (static_cast<double>(i) / static_cast<double>(bins)));
    }
    std::map<int, std::vector<std::size_t>> per_class;
    for (std::size_t k = 0; k < values.size(); ++k) {
        auto& counts = per_class[labels[k]];
        counts.resize(bins, 0);
        std::size_t b = 0;
        if (range > 0.0) {
            // First upper edge >= v, so a value on an inner edge falls in the bin below it.
            b = static_cast<std::size_t>(std::lower_bound(h.edges.begin() + 1, h.edges.end(), values[k]) -
                                         (h.edges.begin() + 1));
            b = std::min(b, bins - 1);
        }
        ++counts[b];
    }
    for (auto& [cls, counts] : per_class) {
        h.classes.push_back(cls);
        h.counts.push_back(std::move(counts));
    }
    return h;
}

Histogram merge_bin_pairs(const Histogram& h) {
    const std::size_t bins = h.edges.size() - 1;
    if (bins % 2 != 0) throw Error(Errc::invalid_argument, "bin count must be even to merge pairs");
    Histogram out;
    out.classes = h.classes;
    for (std::size_t i = 0; i <= bins; i += 2) out.edges.push_back(h.edges[i]);
    for (const auto& counts : h.counts) {
        std::vector<std::size_t> merged(bins / 2);
        for (std::size_t i = 0; i < merged.size(); ++i) merged[i] = counts[2 * i] + counts[2 * i + 1];
        out.counts.push_back(std::move(merged));
    }
    return out;
}

double mean_residual(std::span<const double> residual_map) {
    if (residual_map.empty()) throw Error(Errc::empty_input, "empty residual map");
    double s = 0.0;
    for (double r : residual_map) s += std::fabs(r);
    return s / static_cast<double>(residual_map.size());
}

double localization_overlap(std::span<const double> residual_map,
                            std::span<const std::uint8_t> truth_mask, std::size_t top_k) {
    if (residual_map.size() != truth_mask.size()) {
        throw Error(Errc::shape_mismatch, "residual map and mask differ in size");
    }
    const auto mask_size = static_cast<std::size_t>(std::ranges::count_if(truth_mask, [](auto m) { return m != 0; }));
    if (mask_size == 0) throw Error(Errc::empty_mask, "truth mask has no defect pixels");
    std::vector<std::size_t> order(residual_map.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = std::min(top_k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return residual_map[a] != residual_map[b] ? residual_map[a] > residual_map[b] : a < b;
                      });
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += truth_mask[order[i]] != 0;
    return static_cast<double>(hits) / static_cast<double>(mask_size);
}

nlohmann::json to_json(const EvalReport& r) {
    auto hist = [](const Histogram& h) {
        nlohmann::json per_class = nlohmann::json::object();
        for (std::size_t c = 0; c < h.classes.size(); ++c) per_class[std::to_string(h.classes[c])] = h.counts[c];
        return nlohmann::json{{"edges", h.edges}, {"counts", per_class}};
    };
    nlohmann::json j = {{"n_items", r.n_items},
                        {"n_abnormal", r.n_abnormal},
                        {"auc", r.auc},
                        {"best_f1", r.best.f1},
                        {"best_threshold", r.best.threshold},
                        {"confusion",
                         {{"tp", r.best.confusion.tp},
                          {"fp", r.best.confusion.fp},
                          {"tn", r.best.confusion.tn},
                          {"fn", r.best.confusion.fn}}},
                        {"score_histogram", hist(r.score_histogram)}};
    if (!r.residual_histogram.edges.empty()) j["residual_histogram"] = hist(r.residual_histogram);
    return j;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_lo,bin_hi,class,count\n";
    for (std::size_t c = 0; c < h.classes.size(); ++c) {
        for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
            out += real(h.edges[b]) + ',' + real(h.edges[b + 1]) + ',' +
                   std::to_string(h.classes[c]) + ',' + std::to_string(h.counts[c][b]) + '\n';
        }
    }
    return out;
}

}  // namespace nad::eval
