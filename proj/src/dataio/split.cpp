#include "nad/dataio/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "nad/error.hpp"
#include "nad/util/random.hpp"

namespace nad::data {

namespace {

std::size_t floor_share(double fraction, std::size_t n) {
    // Rounded to 1e-9 first so 0.7 * 100 counts as 70.
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace

ExperimentSplit build_split(const LabeledImageSet& data, int normal_class,
                            const std::vector<int>& classes, std::uint64_t seed,
                            const SplitOptions& options) {
    if (!(options.train_fraction >= 0.0 && options.train_fraction <= 1.0) ||
        !(options.abnormal_fraction >= 0.0 && options.abnormal_fraction <= 1.0)) {
        throw Error(Errc::fraction_out_of_range, "split fractions must lie in [0, 1]");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < data.size(); ++i) by_class[data.labels[i]].push_back(i);
    for (int c : classes) {
        if (!by_class.contains(c)) throw Error(Errc::missing_class, "no images of class " + std::to_string(c));
    }
    if (!by_class.contains(normal_class)) {
        throw Error(Errc::missing_class, "no images of normal class " + std::to_string(normal_class));
    }

    ExperimentSplit s;
    s.normal_class = normal_class;
    s.seed = seed;
    Rng rng(derive_seed(seed, streams::split));
    std::vector<std::pair<std::size_t, int>> test;
    for (auto& [label, idx] : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        const bool normal = label == normal_class;
        const std::size_t k =
            floor_share(normal ? options.train_fraction : options.abnormal_fraction, idx.size());
        auto& dest = normal ? s.normal_train : s.abnormal_train;
        dest.insert(dest.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
        for (std::size_t j = k; j < idx.size(); ++j) test.emplace_back(idx[j], normal ? 0 : 1);
    }
    std::ranges::sort(test);
    for (const auto& [i, l] : test) {
        s.test.push_back(i);
        s.test_labels.push_back(l);
    }
    return s;
}

ExperimentSplit build_mnist_split(const LabeledImageSet& data, int normal_class, std::uint64_t seed) {
    std::vector<int> digits(10);
    std::iota(digits.begin(), digits.end(), 0);
    return build_split(data, normal_class, digits, seed);
}

ExperimentSplit inject_contamination(const ExperimentSplit& split, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 0.5)) {
        throw Error(Errc::fraction_out_of_range, "contamination fraction must lie in [0, 0.5]");
    }
    ExperimentSplit out = split;
    out.contamination_fraction = fraction;
    const std::size_t k = floor_share(fraction, split.normal_train.size());
    if (k == 0) return out;

    std::vector<std::size_t> pool;
    for (std::size_t t = 0; t < split.test.size(); ++t) {
        if (split.test_labels[t] == 1) pool.push_back(t);
    }
    if (pool.size() < k) {
        throw Error(Errc::pool_exhausted, "need " + std::to_string(k) + " abnormal images, pool has " +
                                              std::to_string(pool.size()));
    }
    Rng rng(derive_seed(seed, streams::contamination));
    std::vector<std::size_t> positions(split.normal_train.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    std::shuffle(positions.begin(), positions.end(), rng);
    positions.resize(k);
    std::ranges::sort(positions);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(k);

    std::set<std::size_t> taken(pool.begin(), pool.end());
    for (std::size_t j = 0; j < k; ++j) out.normal_train[positions[j]] = split.test[pool[j]];
    out.test.clear();
    out.test_labels.clear();
    for (std::size_t t = 0; t < split.test.size(); ++t) {
        if (taken.contains(t)) continue;
        out.test.push_back(split.test[t]);
        out.test_labels.push_back(split.test_labels[t]);
    }
    out.contaminated_positions = positions;
    out.contamination_injected =
        static_cast<double>(k) / static_cast<double>(split.normal_train.size());
    return out;
}

void validate_split(const ExperimentSplit& s, std::size_t n) {
    if (s.test.size() != s.test_labels.size()) {
        throw Error(Errc::validation_failed, "test labels do not match test items");
    }
    std::set<std::size_t> test;
    for (std::size_t i = 0; i < s.test.size(); ++i) {
        if (s.test[i] >= n) throw Error(Errc::validation_failed, "test index out of range");
        if (s.test_labels[i] != 0 && s.test_labels[i] != 1) {
            throw Error(Errc::validation_failed, "test labels must be 0 or 1");
        }
        if (!test.insert(s.test[i]).second) throw Error(Errc::validation_failed, "duplicate test index");
    }
    for (const auto* pool : {&s.normal_train, &s.abnormal_train}) {
        for (std::size_t i : *pool) {
            if (i >= n) throw Error(Errc::validation_failed, "training index out of range");
            if (test.contains(i)) {
                throw Error(Errc::validation_failed, "training index " + std::to_string(i) + " is also in test");
            }
        }
    }
}

nlohmann::json to_json(const ExperimentSplit& s) {
    return {{"normal_class", s.normal_class},
            {"seed", s.seed},
            {"normal_train", s.normal_train},
            {"abnormal_train", s.abnormal_train},
            {"test", s.test},
            {"test_labels", s.test_labels},
            {"contamination_fraction", s.contamination_fraction},
            {"contamination_injected", s.contamination_injected},
            {"contaminated_positions", s.contaminated_positions}};
}

ExperimentSplit split_from_json(const nlohmann::json& j) {
    try {
        ExperimentSplit s;
        s.normal_class = j.at("normal_class").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.normal_train = j.at("normal_train").get<std::vector<std::size_t>>();
        s.abnormal_train = j.at("abnormal_train").get<std::vector<std::size_t>>();
        s.test = j.at("test").get<std::vector<std::size_t>>();
        s.test_labels = j.at("test_labels").get<std::vector<int>>();
        s.contamination_fraction = j.at("contamination_fraction").get<double>();
        s.contamination_injected = j.at("contamination_injected").get<double>();
        s.contaminated_positions = j.at("contaminated_positions").get<std::vector<std::size_t>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::validation_failed, std::string("malformed split: ") + e.what());
    }
}

}  // namespace nad::data
