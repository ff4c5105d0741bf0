#pragma once

#include "logrecon/audit_log.hpp"
#include "logrecon/carved.hpp"
#include "logrecon/exec.hpp"
#include "logrecon/report.hpp"

#include <span>
#include <string>
#include <vector>

namespace logrecon {

// Stable sort by version_seq (records without one go last), ties kept in
// carving order. Pairing in consolidate_updates depends on this order.
std::vector<CarvedRecord> reconciliation_order(std::span<const CarvedRecord> carved);

// Deleted records whose (key, value) no delete(old_value) or update(old_value)
// entry explains, first occurrence per (key, value), in input order.
std::vector<CarvedRecord> detect_unattributed_deletes(std::span<const CarvedRecord> carved, const LogIndex& log,
                                                      Exec exec = Exec::Parallel);

// Active records whose (key, value) no insert(new_value) or update(new_value)
// entry explains, first occurrence per (key, value), in input order.
std::vector<CarvedRecord> detect_unattributed_inserts(std::span<const CarvedRecord> carved, const LogIndex& log,
                                                      Exec exec = Exec::Parallel);

struct Consolidation {
  std::vector<CarvedRecord> r_del;
  std::vector<CarvedRecord> r_ins;
  std::vector<UpdatePair> r_upd;
  std::vector<std::string> notes;  // alternate pairing candidates
};

// Pairs each unattributed delete with the first unpaired unattributed insert
// of the same key and a different value. An insert joins at most one pair.
Consolidation consolidate_updates(std::span<const CarvedRecord> deletes, std::span<const CarvedRecord> inserts);

// Full single-snapshot reconciliation. `log` must be built from the expanded
// log. Provenance is left for the caller to fill.
ReconReport reconcile_single(std::span<const CarvedRecord> carved, const LogIndex& log, Exec exec = Exec::Parallel);

}  // namespace logrecon
