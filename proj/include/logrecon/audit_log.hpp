#pragma once

#include "logrecon/canonical.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace logrecon {

enum class Op { Insert, Delete, Update, UpdateFields, DeleteFields };

// Lookup class: field-level operations collapse into Update.
enum class OpClass { Insert = 0, Delete = 1, Update = 2 };

std::string_view op_name(Op op);
std::optional<Op> parse_op(std::string_view token);
OpClass op_class(Op op);

// One normalized line of the application audit log.
struct AuditEntry {
  std::int64_t ts = 0;  // epoch seconds
  Op op = Op::Insert;
  std::string key;
  std::string user;
  std::optional<CanonicalValue> old_value;
  std::optional<CanonicalValue> new_value;
  std::size_t seq = 0;       // 0-based line number in the source log
  bool field_level = false;  // rewritten from update_fields/delete_fields

  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

struct AuditParseOptions {
  bool fold_keys = false;
  // Non-monotone timestamps are a warning by default and an error when strict.
  bool strict_ts = false;
};

// Parses JSONL. Blank lines are skipped but still advance `seq`.
// Throws ParseError carrying the 1-based line number.
std::vector<AuditEntry> parse_audit_log(std::string_view raw, const AuditParseOptions& options = {},
                                        std::vector<std::string>* warnings = nullptr);

// RFC3339 timestamp to epoch seconds (fractional seconds truncated toward the
// earlier second). Returns nullopt for malformed input.
std::optional<std::int64_t> parse_rfc3339(std::string_view text);

// One JSONL line (no trailing newline) with canonical values and epoch ts.
std::string serialize_entry(const AuditEntry& entry);
std::string serialize_audit_log(std::span<const AuditEntry> entries);

// Rewrites update_fields/delete_fields entries as whole-document updates.
//
// The running document of every key starts from `base_state` and follows the
// log: insert/update set it, delete clears it, field operations patch it.
// Throws Error listing every key whose field operation has no base document.
std::vector<AuditEntry> expand_field_ops(std::span<const AuditEntry> entries,
                                         const std::map<std::string, CanonicalValue>& base_state);

// Audit entries bucketed by (key, op class). Immutable after construction.
class LogIndex {
 public:
  LogIndex() = default;
  explicit LogIndex(std::vector<AuditEntry> entries);

  const std::vector<AuditEntry>& entries() const noexcept { return entries_; }
  const AuditEntry& entry(std::size_t i) const { return entries_[i]; }

  // Entry positions for (key, class) in seq order; empty when absent.
  std::span<const std::size_t> bucket(const std::string& key, OpClass cls) const;
  std::size_t bucket_count() const noexcept { return bucket_count_; }

  // First entry explaining a Deleted carved state: delete(key, old_value=v)
  // or update(key, old_value=v). Delete entries are preferred.
  std::optional<std::size_t> explain_deleted(const std::string& key, const CanonicalValue& value) const;

  // First entry explaining an Active carved state: insert(key, new_value=v)
  // or update(key, new_value=v). Insert entries are preferred.
  std::optional<std::size_t> explain_active(const std::string& key, const CanonicalValue& value) const;

 private:
  using Buckets = std::array<std::vector<std::size_t>, 3>;

  std::vector<AuditEntry> entries_;
  std::unordered_map<std::string, Buckets> buckets_;
  std::size_t bucket_count_ = 0;
};

inline LogIndex build_log_index(std::vector<AuditEntry> entries) { return LogIndex(std::move(entries)); }

}  // namespace logrecon
