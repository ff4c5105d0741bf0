#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logrecon {

// Abstracted host file-write event. Every flag must be supplied explicitly.
struct FileWriteEvent {
  bool writer_is_service = false;
  bool binary_integrity_ok = false;
  bool audit_enabled = false;
  bool in_maintenance_window = false;
  bool has_change_ticket = false;
  std::optional<std::string> migration_id;
  bool drift_anomaly = false;
  bool protected_namespace_write = false;
  bool unexpected_restart_or_config_change = false;
  bool workload_within_bounds = false;

  friend bool operator==(const FileWriteEvent&, const FileWriteEvent&) = default;
};

enum class Category { Normal, Maintenance, Suspicious };
enum class SnapshotAction { LogOnly, InfoSnapshot, ForensicSnapshot };

std::string_view category_name(Category c);
std::string_view action_name(SnapshotAction a);

struct PolicyDecision {
  Category category = Category::Suspicious;
  SnapshotAction action = SnapshotAction::ForensicSnapshot;
  std::vector<std::string> reasons;

  friend bool operator==(const PolicyDecision&, const PolicyDecision&) = default;
};

// Suspicious conditions dominate; then the Maintenance row; then Normal;
// anything left over is Suspicious with reason "no_policy_row_matched".
PolicyDecision classify_event(const FileWriteEvent& event);

// JSONL line -> event. Every field is required (`migration_id` may be null);
// an optional "id" is returned through `id`. Throws ParseError.
FileWriteEvent parse_event(std::string_view line, std::size_t line_no, std::optional<std::string>* id = nullptr);

// {"action":..,"category":..,"id"?:..,"reasons":[..]}
std::string decision_json(const PolicyDecision& decision, const std::optional<std::string>& id);

}  // namespace logrecon
