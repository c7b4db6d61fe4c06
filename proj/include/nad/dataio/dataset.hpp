#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nad/autodiff/tensor.hpp"

namespace nad::data {

// Images stored row-major and back to back, pixels in [-1, 1].
struct LabeledImageSet {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels;
    std::vector<int> labels;
    // Per-image defect masks (height * width, 1 = defect); empty when unknown.
    std::vector<std::vector<std::uint8_t>> masks;
    std::string provenance;

    std::size_t size() const { return labels.size(); }
    std::size_t image_size() const { return height * width; }
    std::span<const double> image(std::size_t i) const;
    // Rows of a (indices.size(), H*W) matrix.
    ad::Tensor gather(std::span<const std::size_t> indices) const;
    // Throws ValidationFailed if the invariants do not hold.
    void validate() const;
};

LabeledImageSet load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels);

struct SyntheticConfig {
    std::size_t n = 512;
    double defect_rate = 0.1;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kSyntheticSide = 28;

// Label 1 marks a defect; masks are always populated.
LabeledImageSet generate_synthetic_corpus(const SyntheticConfig& cfg);

inline constexpr std::size_t kPuzzleGrid = 11;
inline constexpr std::size_t kPuzzleTiles = kPuzzleGrid * kPuzzleGrid;

enum class PuzzleVariant { train, test };

struct IrMnistConfig {
    int excluded_digit = 3;
    std::size_t n_samples = 200;
    PuzzleVariant variant = PuzzleVariant::train;
    // Test variant only: share of samples forced to contain the excluded digit.
    double abnormal_fraction = 0.5;
    std::uint64_t seed = 0;
};

struct IrMnistSet {
    LabeledImageSet images;  // label 1 iff a tile shows the excluded digit
    std::vector<std::array<std::size_t, kPuzzleTiles>> tile_sources;
};

// Tiles 11x11 source digits (row-major) into each sample; source must be 28x28 with all ten digits.
IrMnistSet build_ir_mnist(const LabeledImageSet& source, const IrMnistConfig& cfg);
// Renders a puzzle from explicit tile sources.
std::vector<double> render_puzzle(const LabeledImageSet& source,
                                  std::span<const std::size_t> tiles);

}  // namespace nad::data
