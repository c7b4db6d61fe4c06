#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace nad::data {

inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;

// Raw unsigned-byte IDX payload: rank 1 (labels) or rank 3 (count, rows, cols).
struct IdxArray {
    std::vector<std::uint32_t> dims;
    std::vector<std::uint8_t> values;

    std::uint32_t magic() const { return dims.size() == 3 ? kIdxImageMagic : kIdxLabelMagic; }
};

// Errors: BadMagic, TruncatedFile, DimensionOverflow; trailing bytes are a ValidationFailed.
IdxArray parse_idx(std::span<const std::uint8_t> bytes);
IdxArray parse_idx(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_idx(const IdxArray& idx);

// v / 127.5 - 1.
inline double pixel_to_unit(std::uint8_t v) { return static_cast<double>(v) / 127.5 - 1.0; }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace nad::data
