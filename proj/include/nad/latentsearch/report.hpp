#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "nad/latentsearch/search.hpp"

namespace nad::latent {

struct ScoreRow {
    std::string item_id;
    std::optional<int> label;  // 1 abnormal, 0 normal
    double score = 0.0;
    double l_r = 0.0;
    double l_d = 0.0;
    double d_gz = 0.0;
    std::size_t n_iters_used = 0;
    std::uint64_t seed = 0;
};

ScoreRow make_score_row(std::string item_id, std::optional<int> label, const AnomalyResult& r);

// Header: item_id,label,score,l_r,l_d,d_gz,n_iters_used,seed. Reals use %.17g.
void write_scores_csv(std::ostream& out, std::span<const ScoreRow> rows);
void write_scores_csv(const std::filesystem::path& path, std::span<const ScoreRow> rows);

// Binary 8-bit PGM with pixel = clamp(255 * r / max(r)); an all-zero map stays black.
std::vector<std::uint8_t> encode_residual_pgm(std::span<const double> residual, std::size_t height,
                                              std::size_t width);
void write_residual_pgm(const std::filesystem::path& path, std::span<const double> residual,
                        std::size_t height, std::size_t width);

}  // namespace nad::latent
