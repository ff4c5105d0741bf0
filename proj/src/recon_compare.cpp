#include "logrecon/recon_compare.hpp"

#include "logrecon/error.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace logrecon {
namespace {

void require_paged(const CarvedSnapshot& s, const char* side) {
  if (!s.fully_hashed()) {
    throw ConfigError(std::string(side) +
                      " snapshot lacks page hashes; compare mode needs a page-hashing carver (use --mode single)");
  }
  // Every paged record sits in exactly one page, so a shortfall means unpaged records.
  std::size_t paged = 0;
  for (const auto& p : s.pages) paged += p.records.size();
  if (paged != s.flat.size()) {
    for (const auto& r : s.flat) {
      if (!r.page_id) {
        throw ConfigError(std::string(side) + " snapshot has records without page metadata (key " + r.key +
                          "); use --mode single");
      }
    }
  }
}

const std::vector<CarvedRecord>& records_of(const CarvedPage* page) {
  static const std::vector<CarvedRecord> kEmpty;
  return page ? page->records : kEmpty;
}

PageDelta diff_one(std::uint64_t index, const CarvedPage* before, const CarvedPage* after) {
  std::map<std::string, std::pair<std::vector<const CarvedRecord*>, std::vector<const CarvedRecord*>>> by_key;
  for (const auto& r : records_of(before)) by_key[r.key].first.push_back(&r);
  for (const auto& r : records_of(after)) by_key[r.key].second.push_back(&r);

  PageDelta delta;
  delta.page_index = index;
  for (auto& [key, sides] : by_key) {
    auto& [b, a] = sides;
    // Identical values on both sides cancel one for one.
    for (auto bi = b.begin(); bi != b.end();) {
      auto ai = std::find_if(a.begin(), a.end(), [&](const CarvedRecord* r) { return r->value == (*bi)->value; });
      if (ai != a.end()) {
        a.erase(ai);
        bi = b.erase(bi);
      } else {
        ++bi;
      }
    }
    std::size_t i = 0;
    for (; i < b.size() && i < a.size(); ++i) delta.changed.push_back({*b[i], *a[i]});
    for (std::size_t j = i; j < b.size(); ++j) delta.removed.push_back(*b[j]);
    for (std::size_t j = i; j < a.size(); ++j) delta.added.push_back(*a[j]);
  }
  return delta;
}

std::uint64_t page_of(const CarvedRecord& r) { return r.page_id.value_or(0); }

void sort_by_page_and_key(std::vector<CarvedRecord>& v) {
  std::stable_sort(v.begin(), v.end(), [](const CarvedRecord& x, const CarvedRecord& y) {
    if (page_of(x) != page_of(y)) return page_of(x) < page_of(y);
    return x.key < y.key;
  });
}

// Hands out log entries so that each explains at most one change.
class Attributor {
 public:
  Attributor(const LogIndex& log, bool key_only) : log_(log), key_only_(key_only) {}

  std::optional<std::size_t> update(const std::string& key, const CanonicalValue& before,
                                    const CanonicalValue& after) {
    return claim(key, OpClass::Update, [&](const AuditEntry& e) {
      return e.op == Op::Update && e.old_value && e.new_value && *e.old_value == before && *e.new_value == after;
    });
  }
  std::optional<std::size_t> remove(const std::string& key, const CanonicalValue& before) {
    return claim(key, OpClass::Delete, [&](const AuditEntry& e) { return e.old_value && *e.old_value == before; });
  }
  std::optional<std::size_t> insert(const std::string& key, const CanonicalValue& after) {
    return claim(key, OpClass::Insert, [&](const AuditEntry& e) { return e.new_value && *e.new_value == after; });
  }

 private:
  template <class Pred>
  std::optional<std::size_t> claim(const std::string& key, OpClass cls, Pred matches) {
    auto bucket = log_.bucket(key, cls);
    if (key_only_) {
      if (bucket.empty()) return std::nullopt;
      return bucket.front();
    }
    for (std::size_t i : bucket) {
      if (used_.contains(i)) continue;
      if (matches(log_.entry(i))) {
        used_.insert(i);
        return i;
      }
    }
    return std::nullopt;
  }

  const LogIndex& log_;
  bool key_only_;
  std::unordered_set<std::size_t> used_;
};

}  // namespace

DiffResult diff_pages(const CarvedSnapshot& before, const CarvedSnapshot& after, const DiffOptions& options) {
  require_paged(before, "before");
  require_paged(after, "after");

  // Both page lists are sorted by index; walk them together over the union.
  struct Pair {
    std::uint64_t index;
    const CarvedPage* before;
    const CarvedPage* after;
  };
  std::vector<Pair> pairs;
  pairs.reserve(std::max(before.pages.size(), after.pages.size()));
  for (std::size_t i = 0, j = 0; i < before.pages.size() || j < after.pages.size();) {
    const CarvedPage* b = i < before.pages.size() ? &before.pages[i] : nullptr;
    const CarvedPage* a = j < after.pages.size() ? &after.pages[j] : nullptr;
    if (b && a && b->index == a->index) {
      pairs.push_back({b->index, b, a});
      ++i, ++j;
    } else if (b && (!a || b->index < a->index)) {
      pairs.push_back({b->index, b, nullptr});
      ++i;
    } else {
      pairs.push_back({a->index, nullptr, a});
      ++j;
    }
  }

  const auto n = static_cast<std::int64_t>(pairs.size());
  std::vector<char> visit(pairs.size(), 0);
  std::vector<PageDelta> slots(pairs.size());

#pragma omp parallel for schedule(dynamic, 64) if (options.exec == Exec::Parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const Pair& p = pairs[i];
    if (options.screen && p.before && p.after && p.before->md5 == p.after->md5) continue;
    visit[i] = 1;
    slots[i] = diff_one(p.index, p.before, p.after);
  }

  DiffResult result;
  result.stats.pages_total = pairs.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!visit[i]) continue;
    result.stats.visited.push_back(pairs[i].index);
    if (!slots[i].empty()) result.deltas.push_back(std::move(slots[i]));
  }
  return result;
}

ReconReport compare_and_attribute(const CarvedSnapshot& before, const CarvedSnapshot& after, const LogIndex& log,
                                  const CompareOptions& options) {
  DiffResult diff = diff_pages(before, after, {options.screen, options.exec});

  std::vector<PageChange> changed;
  std::vector<CarvedRecord> removed;
  std::vector<CarvedRecord> added;
  for (auto& d : diff.deltas) {
    for (auto& c : d.changed) changed.push_back(std::move(c));
    for (auto& r : d.removed) removed.push_back(std::move(r));
    for (auto& r : d.added) added.push_back(std::move(r));
  }

  // A record that left one page and appeared on another is a relocation when
  // its value is unchanged, and a change otherwise.
  std::size_t relocated = 0;
  {
    std::unordered_map<std::string, std::vector<std::size_t>> added_by_key;
    for (std::size_t i = 0; i < added.size(); ++i) added_by_key[added[i].key].push_back(i);
    std::vector<char> added_gone(added.size(), 0);
    std::vector<char> removed_gone(removed.size(), 0);

    for (std::size_t i = 0; i < removed.size(); ++i) {
      auto it = added_by_key.find(removed[i].key);
      if (it == added_by_key.end()) continue;
      for (std::size_t j : it->second) {
        if (!added_gone[j] && added[j].value == removed[i].value) {
          added_gone[j] = removed_gone[i] = 1;
          ++relocated;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < removed.size(); ++i) {
      if (removed_gone[i]) continue;
      auto it = added_by_key.find(removed[i].key);
      if (it == added_by_key.end()) continue;
      for (std::size_t j : it->second) {
        if (!added_gone[j]) {
          added_gone[j] = removed_gone[i] = 1;
          changed.push_back({removed[i], added[j]});
          break;
        }
      }
    }
    std::vector<CarvedRecord> keep_removed, keep_added;
    for (std::size_t i = 0; i < removed.size(); ++i) {
      if (!removed_gone[i]) keep_removed.push_back(std::move(removed[i]));
    }
    for (std::size_t j = 0; j < added.size(); ++j) {
      if (!added_gone[j]) keep_added.push_back(std::move(added[j]));
    }
    removed = std::move(keep_removed);
    added = std::move(keep_added);
  }

  auto change_page = [](const PageChange& c) { return page_of(c.after); };
  std::stable_sort(changed.begin(), changed.end(), [&](const PageChange& x, const PageChange& y) {
    if (change_page(x) != change_page(y)) return change_page(x) < change_page(y);
    return x.after.key < y.after.key;
  });
  sort_by_page_and_key(removed);
  sort_by_page_and_key(added);

  ReconReport report;
  report.mode = ReconMode::Compare;
  Attributor attributor(log, options.key_only_attribution);

  auto note_field_level = [&](std::size_t entry, const CarvedRecord& record) {
    if (!log.entry(entry).field_level) return;
    ++report.attributed.field_level_matched;
    report.field_level.push_back({record, log.entry(entry).seq});
  };

  for (const auto& c : changed) {
    if (auto hit = attributor.update(c.after.key, c.before.value, c.after.value)) {
      ++report.attributed.updates_matched;
      note_field_level(*hit, c.after);
    } else {
      report.r_upd.push_back({c.before, c.after});
    }
  }
  for (const auto& r : removed) {
    if (auto hit = attributor.remove(r.key, r.value)) {
      ++report.attributed.deletes_matched;
      note_field_level(*hit, r);
    } else {
      report.r_del.push_back(r);
    }
  }
  for (const auto& r : added) {
    if (auto hit = attributor.insert(r.key, r.value)) {
      ++report.attributed.inserts_matched;
      note_field_level(*hit, r);
    } else {
      report.r_ins.push_back(r);
    }
  }

  if (relocated > 0) {
    report.notes.push_back(std::to_string(relocated) + " record(s) moved between pages with unchanged values");
  }
  if (options.key_only_attribution) {
    report.notes.push_back("key-only attribution: log values were not checked");
  }
  report.screening = std::move(diff.stats);
  return report;
}

}  // namespace logrecon
