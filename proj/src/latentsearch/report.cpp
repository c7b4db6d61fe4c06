#include "nad/latentsearch/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "nad/error.hpp"

namespace nad::latent {

namespace {

std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    return out;
}

}  // namespace

ScoreRow make_score_row(std::string item_id, std::optional<int> label, const AnomalyResult& r) {
    return {std::move(item_id), label, r.score, r.l_r, r.l_d, r.d_gz, r.n_iters_used, r.seed};
}

void write_scores_csv(std::ostream& out, std::span<const ScoreRow> rows) {
    out << "item_id,label,score,l_r,l_d,d_gz,n_iters_used,seed\n";
    for (const ScoreRow& r : rows) {
        out << r.item_id << ',' << (r.label ? std::to_string(*r.label) : std::string()) << ','
            << real(r.score) << ',' << real(r.l_r) << ',' << real(r.l_d) << ',' << real(r.d_gz)
            << ',' << r.n_iters_used << ',' << r.seed << '\n';
    }
}

void write_scores_csv(const std::filesystem::path& path, std::span<const ScoreRow> rows) {
    std::ofstream out = open_out(path);
    write_scores_csv(out, rows);
    if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

std::vector<std::uint8_t> encode_residual_pgm(std::span<const double> residual, std::size_t height,
                                              std::size_t width) {
    if (residual.size() != height * width) {
        throw Error(Errc::shape_mismatch, "residual map does not match " + std::to_string(height) +
                                              "x" + std::to_string(width));
    }
    const std::string header = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const double max = residual.empty() ? 0.0 : *std::ranges::max_element(residual);
    for (double r : residual) {
        const double v = max > 0.0 ? std::round(255.0 * r / max) : 0.0;
        out.push_back(static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)));
    }
    return out;
}

void write_residual_pgm(const std::filesystem::path& path, std::span<const double> residual,
                        std::size_t height, std::size_t width) {
    const auto bytes = encode_residual_pgm(residual, height, width);
    std::ofstream out = open_out(path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::io_error, "failed writing " + path.string());
}

}  // namespace nad::latent
