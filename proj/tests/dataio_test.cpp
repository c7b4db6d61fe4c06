#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "nad/dataio/dataset.hpp"
#include "nad/dataio/idx.hpp"
#include "nad/dataio/split.hpp"
#include "support/gradcheck.hpp"

using namespace nad;
using namespace nad::data;
using nad::testing::error_code_of;

namespace {

const std::filesystem::path kMnistDir = std::filesystem::path(NAD_SOURCE_DIR) / "data" / "mnist";

std::vector<std::uint8_t> bytes(std::initializer_list<int> v) {
    return std::vector<std::uint8_t>(v.begin(), v.end());
}

// `per_class` images of 2x2 per label; pixel 0 encodes the index for traceability.
LabeledImageSet toy_set(const std::vector<std::size_t>& per_class) {
    LabeledImageSet s;
    s.height = s.width = 2;
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        for (std::size_t k = 0; k < per_class[c]; ++k) {
            s.labels.push_back(static_cast<int>(c));
            s.pixels.insert(s.pixels.end(), {0.0, 0.0, 0.0, 0.0});
        }
    }
    return s;
}

const LabeledImageSet& mnist() {
    static const LabeledImageSet s =
        load_mnist(kMnistDir / "images-idx3-ubyte", kMnistDir / "labels-idx1-ubyte");
    return s;
}

}  // namespace

TEST(ParseIdx, DecodesHandWrittenImageFile) {
    const auto idx = parse_idx(bytes({0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0, 255, 0, 255}));
    ASSERT_EQ(idx.dims, (std::vector<std::uint32_t>{1, 2, 2}));
    std::vector<double> px;
    for (auto v : idx.values) px.push_back(pixel_to_unit(v));
    EXPECT_EQ(px, (std::vector<double>{-1.0, 1.0, -1.0, 1.0}));
}

TEST(ParseIdx, DecodesLabelFile) {
    const auto idx = parse_idx(bytes({0, 0, 8, 1, 0, 0, 0, 3, 7, 0, 9}));
    EXPECT_EQ(idx.dims, (std::vector<std::uint32_t>{3}));
    EXPECT_EQ(idx.values, bytes({7, 0, 9}));
}

TEST(ParseIdx, Errors) {
    EXPECT_EQ(error_code_of([] { parse_idx(bytes({0, 0, 8, 2, 0, 0, 0, 0})); }), Errc::bad_magic);
    EXPECT_EQ(error_code_of([] { parse_idx(bytes({0, 0, 8})); }), Errc::truncated_file);
    EXPECT_EQ(error_code_of([] { parse_idx(bytes({0, 0, 8, 3, 0, 0, 0, 1})); }), Errc::truncated_file);
    EXPECT_EQ(error_code_of([] { parse_idx(bytes({0, 0, 8, 1, 0, 0, 0, 3, 1})); }),
              Errc::truncated_file);
    EXPECT_EQ(error_code_of([] {
                  parse_idx(bytes({0, 0, 8, 3, 0x7f, 0xff, 0xff, 0xff, 0x7f, 0xff, 0xff, 0xff, 0, 0, 0, 9}));
              }),
              Errc::dimension_overflow);
    EXPECT_EQ(error_code_of([] { parse_idx(bytes({0, 0, 8, 1, 0, 0, 0, 1, 1, 2})); }),
              Errc::validation_failed);
    EXPECT_EQ(error_code_of([] { parse_idx(std::filesystem::path("/nonexistent/idx")); }),
              Errc::io_error);
}

TEST(ParseIdx, RandomFilesRoundTripByteIdentically) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> dim(0, 6), byte(0, 255), rank(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        IdxArray a;
        a.dims = rank(rng) ? std::vector<std::uint32_t>{static_cast<std::uint32_t>(dim(rng))}
                           : std::vector<std::uint32_t>{static_cast<std::uint32_t>(dim(rng)),
                                                        static_cast<std::uint32_t>(dim(rng)),
                                                        static_cast<std::uint32_t>(dim(rng))};
        std::size_t n = 1;
        for (auto d : a.dims) n *= d;
        for (std::size_t i = 0; i < n; ++i) a.values.push_back(static_cast<std::uint8_t>(byte(rng)));
        const auto encoded = encode_idx(a);
        EXPECT_EQ(encode_idx(parse_idx(encoded)), encoded);
    }
}

TEST(ParseIdx, BundledMnistRoundTrips) {
    for (const char* name : {"images-idx3-ubyte", "labels-idx1-ubyte"}) {
        const auto raw = read_file(kMnistDir / name);
        EXPECT_EQ(encode_idx(parse_idx(raw)), raw) << name;
    }
}

TEST(LoadMnist, BundledSubsetHasAllDigits) {
    const auto& s = mnist();
    EXPECT_EQ(s.size(), 10000u);
    EXPECT_EQ(s.height, 28u);
    EXPECT_EQ(s.width, 28u);
    EXPECT_NO_THROW(s.validate());
    std::map<int, int> counts;
    for (int l : s.labels) ++counts[l];
    EXPECT_EQ(counts.size(), 10u);
    EXPECT_EQ(counts[0], 1001);
}

TEST(BuildSplit, SeventyPercentOfHundredTrains) {
    const auto data = toy_set(std::vector<std::size_t>(10, 100));
    const auto s = build_mnist_split(data, 4, 3);
    EXPECT_EQ(s.normal_train.size(), 70u);
    EXPECT_EQ(s.abnormal_train.size(), 90u);
    std::size_t normal_test = 0;
    for (std::size_t t = 0; t < s.test.size(); ++t) {
        const bool normal = data.labels[s.test[t]] == 4;
        EXPECT_EQ(s.test_labels[t], normal ? 0 : 1);
        normal_test += normal;
    }
    EXPECT_EQ(normal_test, 30u);
    EXPECT_EQ(s.test.size(), 30u + 9u * 90u);
}

TEST(BuildSplit, IsDeterministicPerSeed) {
    const auto data = toy_set({13, 20, 7, 9, 11, 5, 30, 12, 10, 10});
    const auto a = build_mnist_split(data, 2, 9);
    const auto b = build_mnist_split(data, 2, 9);
    EXPECT_EQ(a.normal_train, b.normal_train);
    EXPECT_EQ(a.abnormal_train, b.abnormal_train);
    EXPECT_EQ(a.test, b.test);
    const auto c = build_mnist_split(data, 2, 10);
    EXPECT_NE(a.normal_train, c.normal_train);
}

TEST(BuildSplit, PartitionsEveryClassDisjointly) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> count(1, 40);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> per_class(10);
        for (auto& c : per_class) c = count(rng);
        const auto data = toy_set(per_class);
        const int normal = static_cast<int>(trial % 10);
        const auto s = build_mnist_split(data, normal, static_cast<std::uint64_t>(trial));
        EXPECT_NO_THROW(validate_split(s, data.size()));

        std::vector<int> seen(data.size(), 0);
        for (auto i : s.normal_train) {
            ++seen[i];
            EXPECT_EQ(data.labels[i], normal);
        }
        for (auto i : s.abnormal_train) {
            ++seen[i];
            EXPECT_NE(data.labels[i], normal);
        }
        for (auto i : s.test) ++seen[i];
        EXPECT_TRUE(std::ranges::all_of(seen, [](int k) { return k == 1; }));

        std::map<int, std::size_t> abnormal_per_class;
        for (auto i : s.abnormal_train) ++abnormal_per_class[data.labels[i]];
        for (int c = 0; c < 10; ++c) {
            if (c == normal) continue;
            EXPECT_EQ(abnormal_per_class[c], per_class[static_cast<std::size_t>(c)] / 10);
        }
        EXPECT_EQ(s.normal_train.size(), per_class[static_cast<std::size_t>(normal)] * 7 / 10);
    }
}

TEST(BuildSplit, MissingClassIsRejected) {
    const auto data = toy_set({5, 5, 5, 5, 5, 5, 5, 5, 5});
    EXPECT_EQ(error_code_of([&] { build_mnist_split(data, 0, 1); }), Errc::missing_class);
}

TEST(BuildSplit, JsonRoundTrip) {
    const auto data = toy_set(std::vector<std::size_t>(10, 20));
    const auto s = inject_contamination(build_mnist_split(data, 1, 5), 0.2, 6);
    const auto back = split_from_json(nlohmann::json::parse(to_json(s).dump()));
    EXPECT_EQ(to_json(back), to_json(s));
    EXPECT_EQ(error_code_of([] { split_from_json(nlohmann::json::object()); }), Errc::validation_failed);
}

TEST(InjectContamination, ZeroFractionLeavesSplitUnchanged) {
    const auto data = toy_set(std::vector<std::size_t>(10, 100));
    const auto s = build_mnist_split(data, 0, 1);
    const auto c = inject_contamination(s, 0.0, 2);
    EXPECT_EQ(c.normal_train, s.normal_train);
    EXPECT_EQ(c.test, s.test);
    EXPECT_EQ(c.contamination_injected, 0.0);
}

TEST(InjectContamination, ReplacesExactlyFloorFractionItems) {
    const auto data = toy_set(std::vector<std::size_t>(10, 100));
    const auto s = build_mnist_split(data, 0, 1);
    ASSERT_EQ(s.normal_train.size(), 70u);
    const auto c = inject_contamination(s, 0.1, 2);
    EXPECT_EQ(c.contaminated_positions.size(), 7u);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < s.normal_train.size(); ++i) {
        const bool replaced = std::ranges::count(c.contaminated_positions, i) > 0;
        if (c.normal_train[i] != s.normal_train[i]) {
            ++changed;
            EXPECT_TRUE(replaced);
            EXPECT_NE(data.labels[c.normal_train[i]], 0);
        }
    }
    EXPECT_EQ(changed, 7u);
    EXPECT_EQ(c.abnormal_train, s.abnormal_train);
    EXPECT_EQ(c.test.size(), s.test.size() - 7);
    EXPECT_NEAR(c.contamination_injected, 0.1, 1e-12);
    EXPECT_NO_THROW(validate_split(c, data.size()));
    EXPECT_EQ(inject_contamination(s, 0.1, 2).normal_train, c.normal_train);
    EXPECT_NE(inject_contamination(s, 0.1, 3).normal_train, c.normal_train);
}

TEST(InjectContamination, Errors) {
    const auto data = toy_set({40, 1, 1, 1, 1, 1, 1, 1, 1, 1});
    const auto s = build_mnist_split(data, 0, 1);
    EXPECT_EQ(error_code_of([&] { inject_contamination(s, 0.51, 1); }), Errc::fraction_out_of_range);
    EXPECT_EQ(error_code_of([&] { inject_contamination(s, -0.1, 1); }), Errc::fraction_out_of_range);
    EXPECT_EQ(error_code_of([&] { inject_contamination(s, 0.5, 1); }), Errc::pool_exhausted);
}

TEST(ValidateSplit, DetectsOverlap) {
    ExperimentSplit s;
    s.normal_train = {0, 1};
    s.test = {1};
    s.test_labels = {0};
    EXPECT_EQ(error_code_of([&] { validate_split(s, 3); }), Errc::validation_failed);
}

TEST(IrMnist, TrainingPuzzlesExcludeDigit) {
    IrMnistConfig cfg;
    cfg.n_samples = 4;
    cfg.seed = 3;
    const auto set = build_ir_mnist(mnist(), cfg);
    EXPECT_EQ(set.images.height, 308u);
    EXPECT_EQ(set.images.width, 308u);
    EXPECT_EQ(set.images.size(), 4u);
    EXPECT_NO_THROW(set.images.validate());
    for (std::size_t s = 0; s < 4; ++s) {
        EXPECT_EQ(set.images.labels[s], 0);
        for (auto t : set.tile_sources[s]) EXPECT_NE(mnist().labels[t], 3);
    }
    // Tile (row 2, col 5) of sample 1 is a verbatim copy of its source digit.
    const auto img = set.images.image(1);
    const auto src = mnist().image(set.tile_sources[1][2 * 11 + 5]);
    for (std::size_t r = 0; r < 28; ++r) {
        for (std::size_t c = 0; c < 28; ++c) {
            EXPECT_EQ(img[(2 * 28 + r) * 308 + 5 * 28 + c], src[r * 28 + c]);
        }
    }
}

TEST(IrMnist, TestVariantLabelsMarkExcludedDigit) {
    IrMnistConfig cfg;
    cfg.n_samples = 12;
    cfg.variant = PuzzleVariant::test;
    cfg.seed = 4;
    const auto set = build_ir_mnist(mnist(), cfg);
    int abnormal = 0;
    for (std::size_t s = 0; s < set.images.size(); ++s) {
        const bool has = std::ranges::any_of(set.tile_sources[s],
                                             [](std::size_t t) { return mnist().labels[t] == 3; });
        EXPECT_EQ(set.images.labels[s], has ? 1 : 0);
        abnormal += has;
    }
    EXPECT_GT(abnormal, 0);
    EXPECT_LT(abnormal, 12);
}

TEST(IrMnist, IsDeterministicPerSeed) {
    IrMnistConfig cfg;
    cfg.n_samples = 3;
    cfg.seed = 8;
    EXPECT_EQ(build_ir_mnist(mnist(), cfg).tile_sources, build_ir_mnist(mnist(), cfg).tile_sources);
    const auto small = toy_set({3, 3});
    EXPECT_EQ(error_code_of([&] { build_ir_mnist(small, cfg); }), Errc::invalid_argument);
}

TEST(SyntheticCorpus, DefectRateZeroIsAllNormal) {
    const auto s = generate_synthetic_corpus({.n = 50, .defect_rate = 0.0, .seed = 1});
    EXPECT_EQ(s.size(), 50u);
    EXPECT_NO_THROW(s.validate());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(s.labels[i], 0);
        EXPECT_EQ(std::ranges::count(s.masks[i], 1), 0);
    }
}

TEST(SyntheticCorpus, DefectRateOneMarksEveryImage) {
    const auto s = generate_synthetic_corpus({.n = 200, .defect_rate = 1.0, .seed = 2});
    EXPECT_NO_THROW(s.validate());
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(s.labels[i], 1);
        const auto k = std::ranges::count(s.masks[i], 1);
        EXPECT_GE(k, 1);
        EXPECT_LE(k, 3);
        const auto img = s.image(i);
        for (std::size_t p = 0; p < img.size(); ++p) {
            if (s.masks[i][p]) {
                EXPECT_EQ(img[p], 1.0);
            }
        }
    }
}

TEST(SyntheticCorpus, IsDeterministicAndSeedSensitive) {
    const SyntheticConfig cfg{.n = 20, .defect_rate = 0.3, .seed = 5};
    const auto a = generate_synthetic_corpus(cfg);
    const auto b = generate_synthetic_corpus(cfg);
    EXPECT_EQ(a.pixels, b.pixels);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.masks, b.masks);
    EXPECT_NE(generate_synthetic_corpus({.n = 20, .defect_rate = 0.3, .seed = 6}).pixels, a.pixels);
    EXPECT_EQ(error_code_of([] { generate_synthetic_corpus({.n = 0}); }), Errc::invalid_argument);
    EXPECT_EQ(error_code_of([] { generate_synthetic_corpus({.n = 1, .defect_rate = 1.5}); }),
              Errc::invalid_argument);
}
