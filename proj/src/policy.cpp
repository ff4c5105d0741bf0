#include "logrecon/policy.hpp"

#include "logrecon/canonical.hpp"
#include "logrecon/error.hpp"

#include <array>
#include <set>

namespace logrecon {
namespace {

using nlohmann::json;

constexpr std::array<const char*, 9> kBoolFields = {
    "writer_is_service",     "binary_integrity_ok",       "audit_enabled",
    "in_maintenance_window", "has_change_ticket",         "drift_anomaly",
    "protected_namespace_write", "unexpected_restart_or_config_change", "workload_within_bounds"};

bool& field(FileWriteEvent& e, std::string_view name) {
  if (name == "writer_is_service") return e.writer_is_service;
  if (name == "binary_integrity_ok") return e.binary_integrity_ok;
  if (name == "audit_enabled") return e.audit_enabled;
  if (name == "in_maintenance_window") return e.in_maintenance_window;
  if (name == "has_change_ticket") return e.has_change_ticket;
  if (name == "drift_anomaly") return e.drift_anomaly;
  if (name == "protected_namespace_write") return e.protected_namespace_write;
  if (name == "unexpected_restart_or_config_change") return e.unexpected_restart_or_config_change;
  return e.workload_within_bounds;
}

}  // namespace

std::string_view category_name(Category c) {
  switch (c) {
    case Category::Normal:
      return "Normal";
    case Category::Maintenance:
      return "Maintenance";
    case Category::Suspicious:
      break;
  }
  return "Suspicious";
}

std::string_view action_name(SnapshotAction a) {
  switch (a) {
    case SnapshotAction::LogOnly:
      return "LogOnly";
    case SnapshotAction::InfoSnapshot:
      return "InfoSnapshot";
    case SnapshotAction::ForensicSnapshot:
      break;
  }
  return "ForensicSnapshot";
}

PolicyDecision classify_event(const FileWriteEvent& e) {
  PolicyDecision d;
  auto& why = d.reasons;

  if (!e.audit_enabled) why.push_back("audit_disabled_or_toggled");
  if (!e.binary_integrity_ok) why.push_back("binary_integrity_mismatch");
  if (!e.writer_is_service) why.push_back("non_service_writer");
  if (e.unexpected_restart_or_config_change && !e.in_maintenance_window) {
    why.push_back("unexpected_restart_or_config_change_outside_window");
  }
  if (e.drift_anomaly && !e.has_change_ticket) why.push_back("drift_anomaly_without_ticket");
  if (e.protected_namespace_write && !e.in_maintenance_window) {
    why.push_back("protected_namespace_write_outside_window");
  }
  if (!why.empty()) {
    d.category = Category::Suspicious;
    d.action = SnapshotAction::ForensicSnapshot;
    return d;
  }

  if (e.has_change_ticket && e.binary_integrity_ok && e.audit_enabled && e.migration_id) {
    d.category = Category::Maintenance;
    d.action = SnapshotAction::InfoSnapshot;
    why = {"change_ticket", "binary_integrity_ok", "audit_enabled", "migration_id"};
    return d;
  }

  if (e.writer_is_service && e.binary_integrity_ok && e.audit_enabled && e.workload_within_bounds &&
      !e.in_maintenance_window) {
    d.category = Category::Normal;
    d.action = SnapshotAction::LogOnly;
    why = {"service_writer", "binary_integrity_ok", "audit_enabled", "workload_within_bounds",
           "outside_maintenance_window"};
    return d;
  }

  d.category = Category::Suspicious;
  d.action = SnapshotAction::ForensicSnapshot;
  why.push_back("no_policy_row_matched");
  if (!e.workload_within_bounds) why.push_back("workload_out_of_bounds");
  if (e.in_maintenance_window) why.push_back("maintenance_window_without_ticketed_migration");
  return d;
}

FileWriteEvent parse_event(std::string_view line, std::size_t line_no, std::optional<std::string>* id) {
  json obj = json::parse(line.begin(), line.end(), nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw ParseError(line_no, "malformed JSON object");

  std::set<std::string, std::less<>> known(kBoolFields.begin(), kBoolFields.end());
  known.insert("migration_id");
  known.insert("id");
  for (const auto& [name, _] : obj.items()) {
    if (!known.contains(name)) throw ParseError(line_no, "unknown field '" + name + "'");
  }

  FileWriteEvent e;
  for (const char* name : kBoolFields) {
    auto it = obj.find(name);
    if (it == obj.end()) throw ParseError(line_no, std::string("missing field '") + name + "'");
    if (!it->is_boolean()) throw ParseError(line_no, std::string("field '") + name + "' must be a boolean");
    field(e, name) = it->get<bool>();
  }
  auto mig = obj.find("migration_id");
  if (mig == obj.end()) throw ParseError(line_no, "missing field 'migration_id' (use null when absent)");
  if (mig->is_string()) {
    e.migration_id = mig->get<std::string>();
  } else if (!mig->is_null()) {
    throw ParseError(line_no, "migration_id must be a string or null");
  }

  if (id) {
    id->reset();
    auto it = obj.find("id");
    if (it != obj.end()) *id = it->is_string() ? it->get<std::string>() : it->dump();
  }
  return e;
}

std::string decision_json(const PolicyDecision& d, const std::optional<std::string>& id) {
  json j;
  j["category"] = std::string(category_name(d.category));
  j["action"] = std::string(action_name(d.action));
  j["reasons"] = d.reasons;
  if (id) j["id"] = *id;
  return canonical_dump(j);
}

}  // namespace logrecon
