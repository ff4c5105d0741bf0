#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace logrecon::digest {

// Lowercase hex MD5. Used as a page change detector only, never as a
// security boundary.
std::string md5_hex(std::span<const std::byte> bytes);
std::string md5_hex(std::string_view bytes);

std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view bytes);

std::uint32_t crc32(std::span<const std::byte> bytes);

bool is_lower_hex(std::string_view s, std::size_t length);

}  // namespace logrecon::digest
