#pragma once

// Little-endian helpers shared by the testbench engines.

#include "logrecon/digest.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace logrecon::testbench::detail {

template <class T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <class T>
void store_le(std::string& out, std::size_t at, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out[at + i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
}

template <class T>
T get_le(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return static_cast<T>(v);
}

inline std::uint32_t crc(std::string_view bytes) {
  return digest::crc32(std::as_bytes(std::span<const char>(bytes.data(), bytes.size())));
}

}  // namespace logrecon::testbench::detail
