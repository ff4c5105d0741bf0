#include "logrecon/report.hpp"

#include <algorithm>
#include <sstream>

namespace logrecon {
namespace {

using nlohmann::json;

json record_json(const CarvedRecord& r) {
  json j;
  j["key"] = r.key;
  j["value"] = to_json(r.value);
  j["value_kind"] = r.value.is_document() ? "document" : "scalar";
  j["status"] = std::string(status_name(r.status));
  if (r.version_seq) j["version_seq"] = *r.version_seq;
  if (r.page_id) {
    json page;
    page["page_id"] = *r.page_id;
    if (r.page_md5) page["page_md5"] = *r.page_md5;
    if (r.page_offset) page["page_offset"] = *r.page_offset;
    j["page"] = std::move(page);
  }
  return j;
}

// Short display form of a value for the text table.
std::string display(const CanonicalValue& v) {
  constexpr std::size_t kMax = 60;
  std::string s = v.is_document() ? v.text : json(v.text).dump();
  if (s.size() > kMax) s = s.substr(0, kMax - 3) + "...";
  return s;
}

std::string page_suffix(const CarvedRecord& r) {
  if (!r.page_id) return "";
  return " [page " + std::to_string(*r.page_id) + "]";
}

}  // namespace

std::string_view mode_name(ReconMode mode) { return mode == ReconMode::Single ? "single" : "compare"; }

std::string report_json(const ReconReport& report) {
  const bool compare = report.mode == ReconMode::Compare;
  json j;
  j["schema"] = std::string(kReportSchema);
  j["mode"] = std::string(mode_name(report.mode));

  json deletes = json::array();
  for (const auto& r : report.r_del) {
    deletes.push_back({{"key", r.key},
                       {"transition", compare ? "present -> absent" : "Deleted remnant, no logged delete"},
                       {"record", record_json(r)}});
  }
  json inserts = json::array();
  for (const auto& r : report.r_ins) {
    inserts.push_back({{"key", r.key},
                       {"transition", compare ? "absent -> present" : "Active, no logged insert"},
                       {"record", record_json(r)}});
  }
  json updates = json::array();
  for (const auto& p : report.r_upd) {
    updates.push_back({{"key", p.active.key},
                       {"transition", compare ? "value changed in place" : "Deleted -> Active, no logged update"},
                       {"before", record_json(p.deleted)},
                       {"after", record_json(p.active)}});
  }
  j["findings"] = {{"deletes", std::move(deletes)}, {"inserts", std::move(inserts)}, {"updates", std::move(updates)}};
  j["summary"] = {{"unattributed_deletes", report.r_del.size()},
                  {"unattributed_inserts", report.r_ins.size()},
                  {"unattributed_updates", report.r_upd.size()}};
  j["attributed"] = {{"deletes_matched", report.attributed.deletes_matched},
                     {"inserts_matched", report.attributed.inserts_matched},
                     {"updates_matched", report.attributed.updates_matched},
                     {"field_level_matched", report.attributed.field_level_matched}};

  json field_level = json::array();
  for (const auto& a : report.field_level) {
    field_level.push_back(
        {{"label", std::string(kFieldLevelLabel)}, {"log_line", a.log_seq + 1}, {"record", record_json(a.record)}});
  }
  j["field_level"] = std::move(field_level);
  j["notes"] = report.notes;
  j["provenance"] = {{"log_sha256", report.provenance.log_sha256},
                     {"carved_sha256", report.provenance.carved_sha256},
                     {"tool_version", report.provenance.tool_version}};
  if (report.screening) {
    j["screening"] = {{"pages_total", report.screening->pages_total},
                      {"pages_visited", report.screening->visited.size()},
                      {"visited", report.screening->visited}};
  }
  return j.dump(2) + "\n";
}

std::string report_text(const ReconReport& report) {
  std::ostringstream out;
  out << "logrecon report (" << mode_name(report.mode) << " mode)\n";
  out << "unattributed: " << report.r_del.size() << " delete(s), " << report.r_ins.size() << " insert(s), "
      << report.r_upd.size() << " update(s)\n";
  out << "attributed:   " << report.attributed.deletes_matched << " delete(s), " << report.attributed.inserts_matched
      << " insert(s), " << report.attributed.updates_matched << " update(s), "
      << report.attributed.field_level_matched << " field-level\n";

  if (report.has_findings()) {
    out << "\n";
    out << "KIND    KEY                       BEFORE -> AFTER\n";
    for (const auto& r : report.r_del) {
      out << "delete  " << r.key << "  " << display(r.value) << " -> (none)" << page_suffix(r) << "\n";
    }
    for (const auto& r : report.r_ins) {
      out << "insert  " << r.key << "  (none) -> " << display(r.value) << page_suffix(r) << "\n";
    }
    for (const auto& p : report.r_upd) {
      out << "update  " << p.active.key << "  " << display(p.deleted.value) << " -> " << display(p.active.value)
          << page_suffix(p.active) << "\n";
    }
  }
  if (!report.field_level.empty()) {
    out << "\n" << kFieldLevelLabel << ":\n";
    for (const auto& a : report.field_level) {
      out << "  " << a.record.key << " " << status_name(a.record.status) << " (log line " << a.log_seq + 1 << ")\n";
    }
  }
  if (report.screening) {
    out << "\npages visited: " << report.screening->visited.size() << " of " << report.screening->pages_total << "\n";
  }
  if (!report.notes.empty()) {
    out << "\nnotes:\n";
    for (const auto& n : report.notes) out << "  - " << n << "\n";
  }
  out << "\nlog sha256: " << report.provenance.log_sha256 << "\n";
  for (const auto& d : report.provenance.carved_sha256) out << "carved sha256: " << d << "\n";
  out << "tool version: " << report.provenance.tool_version << "\n";
  return out.str();
}

}  // namespace logrecon
