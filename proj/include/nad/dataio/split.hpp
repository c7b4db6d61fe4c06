#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nad/dataio/dataset.hpp"

namespace nad::data {

// Index-based split over a source LabeledImageSet.
struct ExperimentSplit {
    int normal_class = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> normal_train;
    std::vector<std::size_t> abnormal_train;
    std::vector<std::size_t> test;
    std::vector<int> test_labels;  // 1 abnormal, 0 normal
    double contamination_fraction = 0.0;
    // Share of normal_train that actually holds abnormal-class images.
    double contamination_injected = 0.0;
    // Positions in normal_train that were overwritten, and the source index placed there.
    std::vector<std::size_t> contaminated_positions;
};

struct SplitOptions {
    double train_fraction = 0.7;
    double abnormal_fraction = 0.1;
};

// Per class, a seeded shuffle: the first floor(fraction * count) normal-class items
// train, the first floor(abnormal_fraction * count) of every other class become
// abnormal_train, and everything else is test. `classes` lists the labels that must
// be present (MissingClass otherwise).
ExperimentSplit build_split(const LabeledImageSet& data, int normal_class,
                            const std::vector<int>& classes, std::uint64_t seed,
                            const SplitOptions& options = {});

// build_split over digits 0..9.
ExperimentSplit build_mnist_split(const LabeledImageSet& data, int normal_class, std::uint64_t seed);

// Overwrites floor(fraction * |normal_train|) seeded positions of normal_train with
// abnormal test items, which leave the test set so the pools stay disjoint.
// Errors: FractionOutOfRange (outside [0, 0.5]), PoolExhausted.
ExperimentSplit inject_contamination(const ExperimentSplit& split, double fraction, std::uint64_t seed);

// Throws ValidationFailed when pools overlap or indices fall outside [0, n).
void validate_split(const ExperimentSplit& split, std::size_t n);

nlohmann::json to_json(const ExperimentSplit& split);
ExperimentSplit split_from_json(const nlohmann::json& j);

}  // namespace nad::data
