#include "logrecon/digest.hpp"

#include "logrecon/error.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <array>

namespace logrecon::digest {
namespace {

std::string to_hex(const unsigned char* data, unsigned length) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned i = 0; i < length; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0x0f]);
  }
  return out;
}

std::string evp_hex(const void* data, std::size_t size, const EVP_MD* md) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> out{};
  unsigned length = 0;
  if (EVP_Digest(data, size, out.data(), &length, md, nullptr) != 1) {
    throw Error("EVP_Digest failed");
  }
  return to_hex(out.data(), length);
}

}  // namespace

std::string md5_hex(std::span<const std::byte> bytes) {
  return evp_hex(bytes.data(), bytes.size(), EVP_md5());
}

std::string md5_hex(std::string_view bytes) {
  return evp_hex(bytes.data(), bytes.size(), EVP_md5());
}

std::string sha256_hex(std::span<const std::byte> bytes) {
  return evp_hex(bytes.data(), bytes.size(), EVP_sha256());
}

std::string sha256_hex(std::string_view bytes) {
  return evp_hex(bytes.data(), bytes.size(), EVP_sha256());
}

std::uint32_t crc32(std::span<const std::byte> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; frames are far below 4 GiB but chunk anyway.
  const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    const uInt chunk = left > (1u << 30) ? (1u << 30) : static_cast<uInt>(left);
    crc = ::crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

bool is_lower_hex(std::string_view s, std::size_t length) {
  if (s.size() != length) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

}  // namespace logrecon::digest
