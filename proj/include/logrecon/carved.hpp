#pragma once

#include "logrecon/canonical.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logrecon {

enum class Status { Active, Deleted };

std::string_view status_name(Status s);
// Accepts "Active", "Deleted" and the alias "Delete".
std::optional<Status> parse_status(std::string_view token);

// One record recovered from storage. Page and version fields are storage
// metadata; they never take part in equality tests between values.
struct CarvedRecord {
  std::string key;
  CanonicalValue value;
  Status status = Status::Active;
  std::optional<std::uint64_t> page_id;
  std::optional<std::string> page_md5;  // 32 lowercase hex digits
  std::optional<std::uint64_t> page_offset;
  std::optional<std::uint64_t> version_seq;

  friend bool operator==(const CarvedRecord&, const CarvedRecord&) = default;
};

struct CarvedPage {
  std::uint64_t index = 0;
  std::string md5;  // empty when the carver supplied no page hash
  std::vector<CarvedRecord> records;

  friend bool operator==(const CarvedPage&, const CarvedPage&) = default;
};

// A carved set. `pages` is sorted by index with unique indices; `flat` holds
// every record (paged and unpaged) in carving order.
struct CarvedSnapshot {
  std::vector<CarvedPage> pages;
  std::vector<CarvedRecord> flat;

  const CarvedPage* find_page(std::uint64_t index) const;
  std::vector<CarvedRecord> unpaged() const;
  // True when there is at least one page and every page carries an md5.
  bool fully_hashed() const;

  friend bool operator==(const CarvedSnapshot&, const CarvedSnapshot&) = default;
};

// Assembles a snapshot while enforcing page invariants. Used by the parser and
// by the testbench carvers.
class SnapshotBuilder {
 public:
  // Declares a page (possibly empty). Conflicting md5s are an error.
  void declare_page(std::uint64_t index, const std::string& md5, std::size_t line = 0);
  void add(CarvedRecord record, std::size_t line = 0);
  CarvedSnapshot finish() &&;

 private:
  std::map<std::uint64_t, CarvedPage> pages_;
  std::vector<CarvedRecord> flat_;
};

struct CarvedParseOptions {
  bool fold_keys = false;
};

// Interchange JSONL. A line with `key` is a record:
//   {"key":..,"value":..,"status":..,"page_id"?:..,"page_md5"?:..,"page_offset"?:..,"version_seq"?:..}
// A line without `key` declares a page: {"page_id":..,"page_md5":..}.
CarvedSnapshot parse_carved(std::string_view raw, const CarvedParseOptions& options = {});

// Page declarations first (ascending), then records in carving order.
std::string serialize_carved(const CarvedSnapshot& snapshot);
std::string serialize_record(const CarvedRecord& record);

// Content-only digest over (key, value kind, value text, status). Page and
// version metadata are excluded.
std::string fingerprint(const CarvedRecord& record);

}  // namespace logrecon
