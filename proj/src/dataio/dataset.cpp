#include "nad/dataio/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nad/dataio/idx.hpp"
#include "nad/error.hpp"
#include "nad/util/random.hpp"

namespace nad::data {

std::span<const double> LabeledImageSet::image(std::size_t i) const {
    if (i >= size()) throw Error(Errc::invalid_argument, "image index out of range");
    return std::span<const double>(pixels).subspan(i * image_size(), image_size());
}

ad::Tensor LabeledImageSet::gather(std::span<const std::size_t> indices) const {
    std::vector<double> out;
    out.reserve(indices.size() * image_size());
    for (std::size_t i : indices) {
        const auto img = image(i);
        out.insert(out.end(), img.begin(), img.end());
    }
    return ad::Tensor({indices.size(), image_size()}, std::move(out));
}

void LabeledImageSet::validate() const {
    if (height == 0 || width == 0) throw Error(Errc::validation_failed, "image dims must be positive");
    if (pixels.size() != labels.size() * image_size()) {
        throw Error(Errc::validation_failed, "pixel buffer does not match label count");
    }
    if (!masks.empty()) {
        if (masks.size() != labels.size()) throw Error(Errc::validation_failed, "mask count mismatch");
        for (const auto& m : masks) {
            if (m.size() != image_size()) throw Error(Errc::validation_failed, "mask size mismatch");
        }
    }
    for (double v : pixels) {
        if (!(v >= -1.0 && v <= 1.0)) throw Error(Errc::validation_failed, "pixel outside [-1, 1]");
    }
}

LabeledImageSet load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels) {
    const IdxArray img = parse_idx(images);
    const IdxArray lab = parse_idx(labels);
    if (img.dims.size() != 3) throw Error(Errc::validation_failed, images.string() + " is not an image file");
    if (lab.dims.size() != 1) throw Error(Errc::validation_failed, labels.string() + " is not a label file");
    if (img.dims[0] != lab.dims[0]) {
        throw Error(Errc::validation_failed, "image and label counts differ");
    }
    LabeledImageSet out;
    out.height = img.dims[1];
    out.width = img.dims[2];
    out.pixels.reserve(img.values.size());
    for (auto v : img.values) out.pixels.push_back(pixel_to_unit(v));
    out.labels.assign(lab.values.begin(), lab.values.end());
    out.provenance = "idx:" + images.filename().string() + "," + labels.filename().string();
    return out;
}

LabeledImageSet generate_synthetic_corpus(const SyntheticConfig& cfg) {
    if (cfg.n == 0) throw Error(Errc::invalid_argument, "synthetic corpus needs n >= 1");
    if (!(cfg.defect_rate >= 0.0 && cfg.defect_rate <= 1.0)) {
        throw Error(Errc::invalid_argument, "defect_rate must lie in [0, 1]");
    }
    constexpr std::size_t side = kSyntheticSide;
    constexpr std::size_t top = 6, bottom = 22, left = 5, right = 23;

    Rng rng(derive_seed(cfg.seed, streams::split));
    std::normal_distribution<double> noise(0.0, 0.02);
    std::bernoulli_distribution defective(cfg.defect_rate);
    std::uniform_int_distribution<std::size_t> length(1, 3);
    std::uniform_int_distribution<int> direction(0, 3);
    std::uniform_int_distribution<std::size_t> row(top + 2, bottom - 3), col(left + 2, right - 3);

    LabeledImageSet out;
    out.height = out.width = side;
    out.provenance = "synthetic:n=" + std::to_string(cfg.n) + ",seed=" + std::to_string(cfg.seed);
    out.pixels.reserve(cfg.n * side * side);
    for (std::size_t k = 0; k < cfg.n; ++k) {
        std::vector<double> img(side * side, -1.0);
        for (std::size_t r = top; r < bottom; ++r) {
            for (std::size_t c = left; c < right; ++c) {
                const double ramp = -0.3 + 0.8 * static_cast<double>(c - left) / (right - left - 1);
                img[r * side + c] = std::clamp(ramp + noise(rng), -1.0, 1.0);
            }
        }
        std::vector<std::uint8_t> mask(side * side, 0);
        const bool defect = defective(rng);
        if (defect) {
            static constexpr int dr[] = {0, 1, 1, 1};
            static constexpr int dc[] = {1, 0, 1, -1};
            const std::size_t len = length(rng);
            const int d = direction(rng);
            const std::size_t r0 = row(rng), c0 = col(rng);
            for (std::size_t s = 0; s < len; ++s) {
                const std::size_t p = (r0 + s * dr[d]) * side + (c0 + s * dc[d]);
                img[p] = 1.0;
                mask[p] = 1;
            }
        }
        out.pixels.insert(out.pixels.end(), img.begin(), img.end());
        out.labels.push_back(defect ? 1 : 0);
        out.masks.push_back(std::move(mask));
    }
    return out;
}

std::vector<double> render_puzzle(const LabeledImageSet& source, std::span<const std::size_t> tiles) {
    if (tiles.size() != kPuzzleTiles) throw Error(Errc::invalid_argument, "a puzzle needs 121 tiles");
    const std::size_t h = source.height, w = source.width;
    const std::size_t out_w = kPuzzleGrid * w;
    std::vector<double> out(kPuzzleGrid * h * out_w);
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        const auto img = source.image(tiles[t]);
        const std::size_t r0 = (t / kPuzzleGrid) * h, c0 = (t % kPuzzleGrid) * w;
        for (std::size_t r = 0; r < h; ++r) {
            std::copy_n(img.begin() + static_cast<std::ptrdiff_t>(r * w), w,
                        out.begin() + static_cast<std::ptrdiff_t>((r0 + r) * out_w + c0));
        }
    }
    return out;
}

IrMnistSet build_ir_mnist(const LabeledImageSet& source, const IrMnistConfig& cfg) {
    if (source.height != 28 || source.width != 28) {
        throw Error(Errc::invalid_argument, "IR-MNIST tiles must be 28x28");
    }
    if (!(cfg.abnormal_fraction >= 0.0 && cfg.abnormal_fraction <= 1.0)) {
        throw Error(Errc::invalid_argument, "abnormal_fraction must lie in [0, 1]");
    }
    if (cfg.excluded_digit < 0 || cfg.excluded_digit > 9) {
        throw Error(Errc::invalid_argument, "excluded_digit must be a digit");
    }
    std::vector<std::size_t> allowed, excluded;
    std::array<bool, 10> seen{};
    for (std::size_t i = 0; i < source.size(); ++i) {
        const int l = source.labels[i];
        if (l >= 0 && l < 10) seen[static_cast<std::size_t>(l)] = true;
        (l == cfg.excluded_digit ? excluded : allowed).push_back(i);
    }
    for (int d = 0; d < 10; ++d) {
        if (!seen[static_cast<std::size_t>(d)]) {
            throw Error(Errc::missing_class, "source lacks digit " + std::to_string(d));
        }
    }

    Rng rng(derive_seed(cfg.seed, streams::split));
    std::uniform_int_distribution<std::size_t> pick_allowed(0, allowed.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_any(0, source.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_excluded(0, excluded.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_slot(0, kPuzzleTiles - 1);
    std::bernoulli_distribution abnormal(cfg.abnormal_fraction);

    IrMnistSet out;
    out.images.height = out.images.width = kPuzzleGrid * 28;
    out.images.provenance = "ir_mnist:" + source.provenance;
    for (std::size_t s = 0; s < cfg.n_samples; ++s) {
        std::array<std::size_t, kPuzzleTiles> tiles{};
        const bool force = cfg.variant == PuzzleVariant::test && abnormal(rng);
        for (auto& t : tiles) t = force ? pick_any(rng) : allowed[pick_allowed(rng)];
        if (force) tiles[pick_slot(rng)] = excluded[pick_excluded(rng)];
        const bool has_excluded = std::ranges::any_of(
            tiles, [&](std::size_t t) { return source.labels[t] == cfg.excluded_digit; });
        const auto img = render_puzzle(source, tiles);
        out.images.pixels.insert(out.images.pixels.end(), img.begin(), img.end());
        out.images.labels.push_back(has_excluded ? 1 : 0);
        out.tile_sources.push_back(tiles);
    }
    return out;
}

}  // namespace nad::data
