#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nad/autodiff/tensor.hpp"

namespace nad::ad {

struct NamedTensor {
    std::string name;
    Tensor tensor;
};

// Little-endian layout:
//   "NADT" | version u32 | count u32 |
//   per tensor: name_len u32 | name bytes | rank u32 | dims u32... | f64 data...
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::byte> encode_checkpoint(std::span<const NamedTensor> tensors);
std::vector<NamedTensor> decode_checkpoint(std::span<const std::byte> bytes);

void write_checkpoint(const std::filesystem::path& path, std::span<const NamedTensor> tensors);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

}  // namespace nad::ad
