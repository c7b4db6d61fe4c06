#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace nad {

std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);

// Throws Error(io_error) when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace nad
