#pragma once

// Naive reference implementations used as test oracles. They follow the
// quantifiers of the detection rules literally (nested loops over the raw
// entry list, no index) and never share code with the library kernels.

#include "logrecon/audit_log.hpp"
#include "logrecon/carved.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using logrecon::AuditEntry;
using logrecon::CarvedRecord;
using logrecon::CarvedSnapshot;
using logrecon::Op;
using logrecon::Status;

inline std::vector<CarvedRecord> ordered(std::vector<CarvedRecord> c) {
  std::vector<std::pair<std::uint64_t, std::size_t>> keys;
  for (std::size_t i = 0; i < c.size(); ++i) {
    keys.push_back({c[i].version_seq.value_or(std::numeric_limits<std::uint64_t>::max()), i});
  }
  std::sort(keys.begin(), keys.end());
  std::vector<CarvedRecord> out;
  for (const auto& k : keys) out.push_back(c[k.second]);
  return out;
}

inline bool same_kv(const CarvedRecord& a, const CarvedRecord& b) { return a.key == b.key && a.value == b.value; }

inline bool in_seen(const std::vector<CarvedRecord>& seen, const CarvedRecord& r) {
  for (const auto& s : seen) {
    if (same_kv(s, r)) return true;
  }
  return false;
}

inline std::vector<CarvedRecord> deletes(const std::vector<CarvedRecord>& c, const std::vector<AuditEntry>& log) {
  std::vector<CarvedRecord> out;
  for (const auto& r : c) {
    if (r.status != Status::Deleted || in_seen(out, r)) continue;
    bool explained = false;
    for (const auto& l : log) {
      if (l.key != r.key || !l.old_value || *l.old_value != r.value) continue;
      if (l.op == Op::Delete || l.op == Op::Update) explained = true;
    }
    if (!explained) out.push_back(r);
  }
  return out;
}

inline std::vector<CarvedRecord> inserts(const std::vector<CarvedRecord>& c, const std::vector<AuditEntry>& log) {
  std::vector<CarvedRecord> out;
  for (const auto& r : c) {
    if (r.status != Status::Active || in_seen(out, r)) continue;
    bool explained = false;
    for (const auto& l : log) {
      if (l.key != r.key || !l.new_value || *l.new_value != r.value) continue;
      if (l.op == Op::Insert || l.op == Op::Update) explained = true;
    }
    if (!explained) out.push_back(r);
  }
  return out;
}

struct SingleResult {
  std::vector<CarvedRecord> r_del, r_ins;
  std::vector<std::pair<CarvedRecord, CarvedRecord>> r_upd;
};

// Pairing walks the unattributed inserts in order for every unattributed
// delete; an insert that already joined a pair is skipped.
inline SingleResult single(const std::vector<CarvedRecord>& carved, const std::vector<AuditEntry>& log) {
  const auto c = ordered(carved);
  const auto d = deletes(c, log);
  const auto a = inserts(c, log);
  SingleResult out;
  std::vector<bool> used(a.size(), false);
  for (const auto& del : d) {
    bool paired = false;
    for (std::size_t j = 0; j < a.size() && !paired; ++j) {
      if (!used[j] && a[j].key == del.key && a[j].value != del.value) {
        used[j] = true;
        paired = true;
        out.r_upd.push_back({del, a[j]});
      }
    }
    if (!paired) out.r_del.push_back(del);
  }
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!used[j]) out.r_ins.push_back(a[j]);
  }
  return out;
}

struct CompareResult {
  // (key, before value, after value) with empty text for the missing side.
  std::vector<std::pair<CarvedRecord, CarvedRecord>> updates;
  std::vector<CarvedRecord> deletes;
  std::vector<CarvedRecord> inserts;
};

// Exhaustive key-level diff ignoring pages and hashes entirely. Assumes at
// most one record per key in each snapshot.
inline CompareResult compare(const CarvedSnapshot& before, const CarvedSnapshot& after,
                             const std::vector<AuditEntry>& log) {
  std::map<std::string, CarvedRecord> b, a;
  for (const auto& r : before.flat) b[r.key] = r;
  for (const auto& r : after.flat) a[r.key] = r;

  auto logged = [&](Op op, const std::string& key, const logrecon::CanonicalValue* oldv,
                    const logrecon::CanonicalValue* newv) {
    for (const auto& l : log) {
      if (l.op != op || l.key != key) continue;
      if (oldv && (!l.old_value || *l.old_value != *oldv)) continue;
      if (newv && (!l.new_value || *l.new_value != *newv)) continue;
      return true;
    }
    return false;
  };

  CompareResult out;
  for (const auto& [key, rb] : b) {
    auto it = a.find(key);
    if (it == a.end()) {
      if (!logged(Op::Delete, key, &rb.value, nullptr)) out.deletes.push_back(rb);
    } else if (it->second.value != rb.value) {
      if (!logged(Op::Update, key, &rb.value, &it->second.value)) out.updates.push_back({rb, it->second});
    }
  }
  for (const auto& [key, ra] : a) {
    if (!b.contains(key) && !logged(Op::Insert, key, nullptr, &ra.value)) out.inserts.push_back(ra);
  }
  return out;
}

}  // namespace oracle
