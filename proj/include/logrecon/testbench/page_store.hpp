#pragma once

#include "logrecon/carved.hpp"
#include "logrecon/exec.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Page-based store with in-place updates. Page 0 holds file metadata; data
// pages hold fixed-size slots. Byte layout in docs/formats.md.
namespace logrecon::testbench {

inline constexpr std::string_view kPageFileMagic = "RDRPAGE1";
inline constexpr std::string_view kDataPageMagic = "RDPG";
inline constexpr std::uint32_t kPageVersion = 1;
inline constexpr std::size_t kPageSize = 4096;
inline constexpr std::size_t kSlotSize = 256;
inline constexpr std::size_t kSlotsPerPage = 15;
inline constexpr std::size_t kDataHeaderSize = 16;
inline constexpr std::size_t kBitmapOffset = 16;
inline constexpr std::size_t kBitmapSize = 32;
inline constexpr std::size_t kDirectoryOffset = kBitmapOffset + kBitmapSize;
inline constexpr std::size_t kFirstSlotOffset = kPageSize - kSlotsPerPage * kSlotSize;
// key_len u16 + value_len u16 precede the payload in every slot.
inline constexpr std::size_t kMaxPayload = kSlotSize - 4;

bool is_page_store(std::string_view bytes);

class PageStore {
 public:
  // A new store holds the metadata page and one empty data page.
  PageStore();

  // Each throws Error on a duplicate or missing key, or an oversize record.
  void insert(const std::string& key, const std::string& value);
  void update(const std::string& key, const std::string& value);
  void remove(const std::string& key);
  // Moves every record into the lowest free slots, dropping empty trailing pages.
  void compact();

  std::optional<std::string> get(const std::string& key) const;
  std::map<std::string, std::string> live() const;
  std::size_t page_count() const { return pages_.size(); }
  // (page, slot) of a key, for tests.
  std::optional<std::pair<std::size_t, std::size_t>> location(const std::string& key) const;
  const std::string& bytes() const;

 private:
  void write_slot(std::size_t page, std::size_t slot, const std::string& key, const std::string& value);
  void free_slot(std::size_t page, std::size_t slot);
  bool slot_used(std::size_t page, std::size_t slot) const;
  std::size_t add_page();
  void refresh_meta();

  std::vector<std::string> pages_;  // raw page images, page 0 included
  std::map<std::string, std::pair<std::size_t, std::size_t>> index_;
  mutable std::string image_;
  mutable bool dirty_ = true;
};

// Emits every page (metadata page included) with the md5 of its raw bytes and
// each occupied slot as an Active record. Freed slots are not emitted.
CarvedSnapshot carve_pages(std::string_view bytes, Exec exec = Exec::Parallel);

}  // namespace logrecon::testbench
