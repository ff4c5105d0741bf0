#pragma once

#include "logrecon/audit_log.hpp"
#include "logrecon/carved.hpp"
#include "logrecon/exec.hpp"
#include "logrecon/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace logrecon {

struct PageChange {
  CarvedRecord before;
  CarvedRecord after;

  friend bool operator==(const PageChange&, const PageChange&) = default;
};

// Record-level difference of one page between two snapshots. Records keep
// their own page metadata.
struct PageDelta {
  std::uint64_t page_index = 0;
  std::vector<CarvedRecord> removed;  // key only in the before page
  std::vector<CarvedRecord> added;    // key only in the after page
  std::vector<PageChange> changed;    // key on both sides with different values

  bool empty() const { return removed.empty() && added.empty() && changed.empty(); }

  friend bool operator==(const PageDelta&, const PageDelta&) = default;
};

struct DiffOptions {
  // When false every page is diffed regardless of its md5. Results must not
  // depend on this flag.
  bool screen = true;
  Exec exec = Exec::Parallel;
};

struct DiffResult {
  std::vector<PageDelta> deltas;  // non-empty deltas, ascending page index
  ScreeningStats stats;
};

// Diffs the union of page indices; a page missing on one side counts as
// empty. Throws ConfigError when either snapshot lacks page hashes or holds
// records without a page.
DiffResult diff_pages(const CarvedSnapshot& before, const CarvedSnapshot& after, const DiffOptions& options = {});

struct CompareOptions {
  // Reproduces the printed pseudocode: an operation counts as logged when any
  // entry of the same (key, class) exists, values ignored, no consumption.
  bool key_only_attribution = false;
  bool screen = true;
  Exec exec = Exec::Parallel;
};

// Before/after reconciliation for in-place engines. Findings are sorted by
// (page index, key); each log entry explains at most one change.
ReconReport compare_and_attribute(const CarvedSnapshot& before, const CarvedSnapshot& after, const LogIndex& log,
                                  const CompareOptions& options = {});

}  // namespace logrecon
