#include "logrecon/recon_single.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace logrecon {
namespace {

std::string identity(const CarvedRecord& r) {
  std::string id;
  id.reserve(r.key.size() + r.value.text.size() + 2);
  id += r.key;
  id.push_back('\0');
  id.push_back(r.value.is_document() ? 'D' : 'S');
  id += r.value.text;
  return id;
}

struct Explained {
  std::size_t record;  // position in the scanned span
  std::size_t entry;   // position in the log index
};

struct Scan {
  std::vector<std::size_t> unattributed;
  std::vector<Explained> explained;
};

// Evaluates the attribution predicate for every record of one status, then
// applies the (key, value) seen-set in a serial ordered pass.
Scan scan(std::span<const CarvedRecord> carved, Status want, const LogIndex& log, Exec exec) {
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  const auto n = static_cast<std::int64_t>(carved.size());
  std::vector<std::size_t> match(carved.size(), kNone);
  std::vector<char> relevant(carved.size(), 0);

#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const CarvedRecord& r = carved[i];
    if (r.status != want) continue;
    relevant[i] = 1;
    auto hit = want == Status::Deleted ? log.explain_deleted(r.key, r.value) : log.explain_active(r.key, r.value);
    if (hit) match[i] = *hit;
  }

  Scan out;
  std::unordered_set<std::string> seen_unattributed;
  std::unordered_set<std::string> seen_explained;
  for (std::size_t i = 0; i < carved.size(); ++i) {
    if (!relevant[i]) continue;
    if (match[i] == kNone) {
      if (seen_unattributed.insert(identity(carved[i])).second) out.unattributed.push_back(i);
    } else if (seen_explained.insert(identity(carved[i])).second) {
      out.explained.push_back({i, match[i]});
    }
  }
  return out;
}

std::vector<CarvedRecord> pick(std::span<const CarvedRecord> carved, const std::vector<std::size_t>& idx) {
  std::vector<CarvedRecord> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(carved[i]);
  return out;
}

std::string short_value(const CanonicalValue& v) {
  constexpr std::size_t kMax = 48;
  return v.text.size() > kMax ? v.text.substr(0, kMax - 3) + "..." : v.text;
}

}  // namespace

std::vector<CarvedRecord> reconciliation_order(std::span<const CarvedRecord> carved) {
  std::vector<CarvedRecord> out(carved.begin(), carved.end());
  std::stable_sort(out.begin(), out.end(), [](const CarvedRecord& a, const CarvedRecord& b) {
    return a.version_seq.value_or(std::numeric_limits<std::uint64_t>::max()) <
           b.version_seq.value_or(std::numeric_limits<std::uint64_t>::max());
  });
  return out;
}

std::vector<CarvedRecord> detect_unattributed_deletes(std::span<const CarvedRecord> carved, const LogIndex& log,
                                                      Exec exec) {
  return pick(carved, scan(carved, Status::Deleted, log, exec).unattributed);
}

std::vector<CarvedRecord> detect_unattributed_inserts(std::span<const CarvedRecord> carved, const LogIndex& log,
                                                      Exec exec) {
  return pick(carved, scan(carved, Status::Active, log, exec).unattributed);
}

Consolidation consolidate_updates(std::span<const CarvedRecord> deletes, std::span<const CarvedRecord> inserts) {
  std::unordered_map<std::string, std::vector<std::size_t>> ins_map;
  for (std::size_t i = 0; i < inserts.size(); ++i) ins_map[inserts[i].key].push_back(i);

  Consolidation out;
  std::vector<char> consumed(inserts.size(), 0);
  for (const CarvedRecord& d : deletes) {
    auto it = ins_map.find(d.key);
    if (it == ins_map.end()) {
      out.r_del.push_back(d);
      continue;
    }
    const auto& candidates = it->second;
    auto chosen = candidates.end();
    for (auto c = candidates.begin(); c != candidates.end(); ++c) {
      if (!consumed[*c] && inserts[*c].value != d.value) {
        chosen = c;
        break;
      }
    }
    if (chosen == candidates.end()) {
      out.r_del.push_back(d);
      continue;
    }
    consumed[*chosen] = 1;
    out.r_upd.push_back({d, inserts[*chosen]});

    std::vector<std::string> alternates;
    for (auto c = std::next(chosen); c != candidates.end(); ++c) {
      if (!consumed[*c] && inserts[*c].value != d.value) alternates.push_back(short_value(inserts[*c].value));
    }
    if (!alternates.empty()) {
      std::string note = "key " + d.key + ": paired " + short_value(d.value) + " with " +
                         short_value(inserts[*chosen].value) + "; other candidates:";
      for (const auto& a : alternates) note += " " + a;
      out.notes.push_back(std::move(note));
    }
  }
  for (std::size_t i = 0; i < inserts.size(); ++i) {
    if (!consumed[i]) out.r_ins.push_back(inserts[i]);
  }
  return out;
}

ReconReport reconcile_single(std::span<const CarvedRecord> carved, const LogIndex& log, Exec exec) {
  const std::vector<CarvedRecord> ordered = reconciliation_order(carved);
  const Scan del = scan(ordered, Status::Deleted, log, exec);
  const Scan ins = scan(ordered, Status::Active, log, exec);

  ReconReport report;
  report.mode = ReconMode::Single;

  auto tally = [&](const Scan& s) {
    for (const Explained& e : s.explained) {
      const AuditEntry& entry = log.entry(e.entry);
      if (entry.field_level) {
        ++report.attributed.field_level_matched;
        report.field_level.push_back({ordered[e.record], entry.seq});
      }
    }
  };
  report.attributed.deletes_matched = del.explained.size();
  report.attributed.inserts_matched = ins.explained.size();
  for (const Explained& e : del.explained) {
    if (op_class(log.entry(e.entry).op) == OpClass::Update) ++report.attributed.updates_matched;
  }
  tally(del);
  tally(ins);

  Consolidation c = consolidate_updates(pick(ordered, del.unattributed), pick(ordered, ins.unattributed));
  report.r_del = std::move(c.r_del);
  report.r_ins = std::move(c.r_ins);
  report.r_upd = std::move(c.r_upd);

  std::map<std::string, std::set<CanonicalValue>> active_values;
  for (const CarvedRecord& r : ordered) {
    if (r.status == Status::Active) active_values[r.key].insert(r.value);
  }
  for (const auto& [key, values] : active_values) {
    if (values.size() > 1) {
      report.notes.push_back("key " + key + " has " + std::to_string(values.size()) +
                             " distinct Active values in the carved set");
    }
  }
  for (auto& n : c.notes) report.notes.push_back(std::move(n));
  return report;
}

}  // namespace logrecon
