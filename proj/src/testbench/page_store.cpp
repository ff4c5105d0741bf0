#include "logrecon/testbench/page_store.hpp"

#include "bytes.hpp"
#include "logrecon/digest.hpp"
#include "logrecon/error.hpp"

#include <cstdint>

namespace logrecon::testbench {
namespace {

using detail::get_le;
using detail::store_le;

std::size_t slot_offset(std::size_t slot) { return kFirstSlotOffset + slot * kSlotSize; }

std::string blank_data_page(std::uint32_t page_no) {
  std::string page(kPageSize, '\0');
  page.replace(0, kDataPageMagic.size(), kDataPageMagic);
  store_le<std::uint32_t>(page, 4, page_no);
  store_le<std::uint16_t>(page, 8, static_cast<std::uint16_t>(kSlotsPerPage));
  store_le<std::uint16_t>(page, 10, 0);
  return page;
}

struct PageView {
  std::uint64_t index = 0;
  std::string md5;
  std::vector<CarvedRecord> records;
};

PageView carve_one(std::string_view file, std::size_t index) {
  const std::size_t base = index * kPageSize;
  const std::string_view page = file.substr(base, kPageSize);
  PageView view;
  view.index = index;
  view.md5 = digest::md5_hex(page);
  if (index == 0) return view;

  if (page.substr(0, 4) != kDataPageMagic) throw CorruptionError(base, "bad data page magic");
  if (get_le<std::uint32_t>(page, 4) != index) throw CorruptionError(base + 4, "page number mismatch");
  if (get_le<std::uint16_t>(page, 8) != kSlotsPerPage) throw CorruptionError(base + 8, "unexpected slot count");

  for (std::size_t s = 0; s < kSlotsPerPage; ++s) {
    const auto bits = static_cast<unsigned char>(page[kBitmapOffset + s / 8]);
    if (!(bits & (1u << (s % 8)))) continue;
    const std::size_t at = slot_offset(s);
    const auto key_len = get_le<std::uint16_t>(page, at);
    const auto value_len = get_le<std::uint16_t>(page, at + 2);
    if (key_len == 0 || std::size_t{key_len} + value_len > kMaxPayload) {
      throw CorruptionError(base + at, "slot lengths out of range");
    }
    const std::size_t dir = kDirectoryOffset + s * 4;
    if (get_le<std::uint16_t>(page, dir) != at || get_le<std::uint16_t>(page, dir + 2) != 4 + key_len + value_len) {
      throw CorruptionError(base + dir, "slot directory disagrees with slot contents");
    }
    CarvedRecord r;
    r.key.assign(page.substr(at + 4, key_len));
    r.value = canon(page.substr(at + 4 + key_len, value_len));
    r.status = Status::Active;
    r.page_id = index;
    r.page_md5 = view.md5;
    r.page_offset = at;
    view.records.push_back(std::move(r));
  }
  return view;
}

}  // namespace

bool is_page_store(std::string_view bytes) { return bytes.substr(0, kPageFileMagic.size()) == kPageFileMagic; }

PageStore::PageStore() {
  pages_.emplace_back(kPageSize, '\0');
  add_page();
  refresh_meta();
}

std::size_t PageStore::add_page() {
  pages_.push_back(blank_data_page(static_cast<std::uint32_t>(pages_.size())));
  dirty_ = true;
  return pages_.size() - 1;
}

void PageStore::refresh_meta() {
  std::string& meta = pages_[0];
  meta.assign(kPageSize, '\0');
  meta.replace(0, kPageFileMagic.size(), kPageFileMagic);
  store_le<std::uint32_t>(meta, 8, kPageVersion);
  store_le<std::uint32_t>(meta, 12, static_cast<std::uint32_t>(kPageSize));
  store_le<std::uint32_t>(meta, 16, static_cast<std::uint32_t>(pages_.size()));
  store_le<std::uint32_t>(meta, 20, static_cast<std::uint32_t>(kSlotSize));
  store_le<std::uint32_t>(meta, 24, static_cast<std::uint32_t>(kSlotsPerPage));
  store_le<std::uint64_t>(meta, 32, static_cast<std::uint64_t>(index_.size()));
  dirty_ = true;
}

bool PageStore::slot_used(std::size_t page, std::size_t slot) const {
  return static_cast<unsigned char>(pages_[page][kBitmapOffset + slot / 8]) & (1u << (slot % 8));
}

void PageStore::write_slot(std::size_t page, std::size_t slot, const std::string& key, const std::string& value) {
  std::string& p = pages_[page];
  const std::size_t at = slot_offset(slot);
  p.replace(at, kSlotSize, kSlotSize, '\0');
  store_le<std::uint16_t>(p, at, static_cast<std::uint16_t>(key.size()));
  store_le<std::uint16_t>(p, at + 2, static_cast<std::uint16_t>(value.size()));
  p.replace(at + 4, key.size(), key);
  p.replace(at + 4 + key.size(), value.size(), value);

  if (!slot_used(page, slot)) {
    p[kBitmapOffset + slot / 8] = static_cast<char>(p[kBitmapOffset + slot / 8] | (1u << (slot % 8)));
    store_le<std::uint16_t>(p, 10, static_cast<std::uint16_t>(get_le<std::uint16_t>(p, 10) + 1));
  }
  store_le<std::uint16_t>(p, kDirectoryOffset + slot * 4, static_cast<std::uint16_t>(at));
  store_le<std::uint16_t>(p, kDirectoryOffset + slot * 4 + 2, static_cast<std::uint16_t>(4 + key.size() + value.size()));
  dirty_ = true;
}

// Clears the bitmap bit and the directory length. Record bytes stay behind.
void PageStore::free_slot(std::size_t page, std::size_t slot) {
  std::string& p = pages_[page];
  p[kBitmapOffset + slot / 8] = static_cast<char>(p[kBitmapOffset + slot / 8] & ~(1u << (slot % 8)));
  store_le<std::uint16_t>(p, 10, static_cast<std::uint16_t>(get_le<std::uint16_t>(p, 10) - 1));
  store_le<std::uint16_t>(p, kDirectoryOffset + slot * 4 + 2, 0);
  dirty_ = true;
}

void PageStore::insert(const std::string& key, const std::string& value) {
  if (key.empty()) throw Error("empty key");
  if (index_.contains(key)) throw Error("insert of existing key " + key);
  if (key.size() + value.size() > kMaxPayload) throw Error("record for " + key + " does not fit a slot");
  for (std::size_t page = 1; page < pages_.size(); ++page) {
    if (get_le<std::uint16_t>(pages_[page], 10) == kSlotsPerPage) continue;
    for (std::size_t slot = 0; slot < kSlotsPerPage; ++slot) {
      if (slot_used(page, slot)) continue;
      write_slot(page, slot, key, value);
      index_[key] = {page, slot};
      refresh_meta();
      return;
    }
  }
  const std::size_t page = add_page();
  write_slot(page, 0, key, value);
  index_[key] = {page, 0};
  refresh_meta();
}

void PageStore::update(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it == index_.end()) throw Error("update of missing key " + key);
  if (key.size() + value.size() > kMaxPayload) throw Error("record for " + key + " does not fit a slot");
  write_slot(it->second.first, it->second.second, key, value);
}

void PageStore::remove(const std::string& key) {
  auto it = index_.find(key);
  if (it == index_.end()) throw Error("delete of missing key " + key);
  free_slot(it->second.first, it->second.second);
  index_.erase(it);
  refresh_meta();
}

void PageStore::compact() {
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::string>> order;
  for (const auto& [key, loc] : index_) order.push_back({loc, key});
  std::sort(order.begin(), order.end());

  std::vector<std::pair<std::string, std::string>> records;
  for (const auto& [loc, key] : order) records.emplace_back(key, *get(key));

  const std::size_t needed = std::max<std::size_t>(1, (records.size() + kSlotsPerPage - 1) / kSlotsPerPage);
  pages_.resize(1);
  index_.clear();
  for (std::size_t i = 0; i < needed; ++i) add_page();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t page = 1 + i / kSlotsPerPage;
    const std::size_t slot = i % kSlotsPerPage;
    write_slot(page, slot, records[i].first, records[i].second);
    index_[records[i].first] = {page, slot};
  }
  refresh_meta();
}

std::optional<std::string> PageStore::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  const std::string& p = pages_[it->second.first];
  const std::size_t at = slot_offset(it->second.second);
  const auto key_len = get_le<std::uint16_t>(p, at);
  const auto value_len = get_le<std::uint16_t>(p, at + 2);
  return p.substr(at + 4 + key_len, value_len);
}

std::map<std::string, std::string> PageStore::live() const {
  std::map<std::string, std::string> out;
  for (const auto& [key, _] : index_) out[key] = *get(key);
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> PageStore::location(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& PageStore::bytes() const {
  if (dirty_) {
    image_.clear();
    image_.reserve(pages_.size() * kPageSize);
    for (const auto& p : pages_) image_ += p;
    dirty_ = false;
  }
  return image_;
}

CarvedSnapshot carve_pages(std::string_view bytes, Exec exec) {
  if (bytes.size() < kPageSize || !is_page_store(bytes)) throw CorruptionError(0, "not a page store (bad magic)");
  if (get_le<std::uint32_t>(bytes, 8) != kPageVersion) throw CorruptionError(8, "unsupported page store version");
  if (get_le<std::uint32_t>(bytes, 12) != kPageSize || get_le<std::uint32_t>(bytes, 20) != kSlotSize ||
      get_le<std::uint32_t>(bytes, 24) != kSlotsPerPage) {
    throw CorruptionError(12, "unsupported page geometry");
  }
  const std::size_t page_count = get_le<std::uint32_t>(bytes, 16);
  if (page_count == 0 || bytes.size() != page_count * kPageSize) {
    throw CorruptionError(16, "page count disagrees with file size");
  }

  std::vector<PageView> views(page_count);
  const auto n = static_cast<std::int64_t>(page_count);
  std::string error;
  std::uint64_t error_offset = 0;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      views[i] = carve_one(bytes, static_cast<std::size_t>(i));
    } catch (const CorruptionError& e) {
#pragma omp critical(carve_pages_error)
      if (error.empty() || e.offset() < error_offset) {
        error = e.what();
        error_offset = e.offset();
      }
    }
  }
  if (!error.empty()) throw CorruptionError(error_offset, "page carve failed: " + error);

  SnapshotBuilder builder;
  for (auto& v : views) {
    builder.declare_page(v.index, v.md5);
    for (auto& r : v.records) builder.add(std::move(r));
  }
  return std::move(builder).finish();
}

}  // namespace logrecon::testbench
