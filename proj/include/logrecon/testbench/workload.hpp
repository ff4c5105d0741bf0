#pragma once

#include "logrecon/audit_log.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace logrecon::testbench {

enum class Engine { Append, Cow, Page };
std::string_view engine_name(Engine e);
std::optional<Engine> parse_engine(std::string_view name);

enum class StepOp {
  Insert,
  Update,
  Delete,
  UpdateFields,
  DeleteFields,
  Pack,
  Compact,
  Snapshot,
  OpenPinReader,
  ClosePinReader
};
std::string_view step_op_name(StepOp op);

struct Step {
  StepOp op = StepOp::Insert;
  std::string key;
  // Whole value for insert/update, a JSON object patch for update_fields, a
  // JSON array of field names for delete_fields.
  std::optional<std::string> value;
  bool logged = true;
  std::string name;  // snapshot name

  friend bool operator==(const Step&, const Step&) = default;
};

// JSONL, one step per line: {"op":..,"key"?:..,"value"?:..,"logged"?:..,"name"?:..}
std::vector<Step> parse_script(std::string_view raw);
std::string serialize_script(std::span<const Step> steps);

inline constexpr std::int64_t kWorkloadEpoch = 1700000000;
inline constexpr std::string_view kWorkloadUser = "app";

struct WorkloadResult {
  std::string db;
  std::vector<AuditEntry> logged;      // what the application wrote to its audit log
  std::vector<AuditEntry> suppressed;  // ground-truth ledger, never read by reconciliation
  std::vector<std::pair<std::string, std::string>> snapshots;  // name -> db bytes
  std::map<std::string, std::string> final_state;

  std::string audit_log() const { return serialize_audit_log(logged); }
  std::string ledger() const { return serialize_audit_log(suppressed); }
};

// Executes the script single-threaded. Throws StepError naming the step for
// operations the engine cannot perform or that violate key semantics.
WorkloadResult run_workload(std::span<const Step> steps, Engine engine);

// Writes store.db, audit.jsonl, ledger.jsonl and snapshots/<name>.db.
void write_workload(const WorkloadResult& result, const std::filesystem::path& dir);

}  // namespace logrecon::testbench
