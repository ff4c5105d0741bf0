#pragma once

#include "logrecon/carved.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logrecon {

inline constexpr std::string_view kReportSchema = "logrecon-report/1";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ReconMode { Single, Compare };
std::string_view mode_name(ReconMode mode);

struct UpdatePair {
  CarvedRecord deleted;  // prior state (Deleted remnant, or the before-snapshot record)
  CarvedRecord active;   // current state

  friend bool operator==(const UpdatePair&, const UpdatePair&) = default;
};

struct AttributionCounts {
  std::size_t deletes_matched = 0;
  std::size_t inserts_matched = 0;
  // Single mode: Deleted remnants explained by an update's old_value (a subset
  // of deletes_matched). Compare mode: changed values explained by an update.
  std::size_t updates_matched = 0;
  std::size_t field_level_matched = 0;

  friend bool operator==(const AttributionCounts&, const AttributionCounts&) = default;
};

// A carved state explained by an entry rewritten from update_fields or
// delete_fields.
struct FieldLevelAttribution {
  CarvedRecord record;
  std::size_t log_seq = 0;

  friend bool operator==(const FieldLevelAttribution&, const FieldLevelAttribution&) = default;
};

inline constexpr std::string_view kFieldLevelLabel = "authorized (field-level)";

struct Provenance {
  std::string log_sha256;
  std::vector<std::string> carved_sha256;
  std::string tool_version{kToolVersion};

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ScreeningStats {
  std::size_t pages_total = 0;
  std::vector<std::uint64_t> visited;  // ascending page indices that were diffed

  friend bool operator==(const ScreeningStats&, const ScreeningStats&) = default;
};

struct ReconReport {
  ReconMode mode = ReconMode::Single;
  std::vector<CarvedRecord> r_del;
  std::vector<CarvedRecord> r_ins;
  std::vector<UpdatePair> r_upd;
  AttributionCounts attributed;
  std::vector<FieldLevelAttribution> field_level;
  std::vector<std::string> notes;
  Provenance provenance;
  std::optional<ScreeningStats> screening;

  bool has_findings() const { return !r_del.empty() || !r_ins.empty() || !r_upd.empty(); }

  friend bool operator==(const ReconReport&, const ReconReport&) = default;
};

// Stable, versioned machine-readable form (pretty-printed JSON, sorted keys).
std::string report_json(const ReconReport& report);
// Human-readable table.
std::string report_text(const ReconReport& report);

}  // namespace logrecon
