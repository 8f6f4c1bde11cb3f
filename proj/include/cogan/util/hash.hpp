#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace cogan::util {

/// Lowercase hex SHA-256 of a byte range.
std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace cogan::util
