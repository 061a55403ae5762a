#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace tgp {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's bytes. Throws IoError if unreadable.
std::string sha256_file_hex(const std::filesystem::path& path);

/// First 8 bytes of SHA-256(data), big-endian. Used to derive seeds from
/// strings in a way any language can reproduce.
std::uint64_t digest64(std::string_view data);

}  // namespace tgp
