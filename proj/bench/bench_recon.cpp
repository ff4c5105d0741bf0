// Serial vs parallel kernels, and hash-screened vs exhaustive page diffing.
//
//   logrecon_bench [records] [changed-page-percent]

#include "logrecon/audit_log.hpp"
#include "logrecon/recon_compare.hpp"
#include "logrecon/recon_single.hpp"
#include "logrecon/testbench/dataset.hpp"
#include "logrecon/testbench/page_store.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <omp.h>
#include <random>

using namespace logrecon;
using namespace logrecon::testbench;

namespace {

double median_ms(const std::function<void()>& fn, int reps = 5) {
  std::vector<double> runs;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    runs.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(runs.begin(), runs.end());
  return runs[runs.size() / 2];
}

void row(const char* what, double serial, double parallel) {
  std::printf("%-34s %10.2f %10.2f %8.2fx\n", what, serial, parallel, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t records = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  const double percent = argc > 2 ? std::strtod(argv[2], nullptr) : 2.0;
  std::printf("threads: %d, records: %zu, changed pages: %.1f%%\n\n", omp_get_max_threads(), records, percent);

  std::mt19937_64 rng(42);
  std::vector<CarvedRecord> carved;
  std::vector<AuditEntry> log;
  for (std::size_t i = 0; i < records; ++i) {
    const auto key = "K" + std::to_string(rng() % (records / 3 + 1));
    carved.push_back({key, canon("v" + std::to_string(rng() % 64)), rng() % 2 ? Status::Active : Status::Deleted,
                      std::nullopt, std::nullopt, std::nullopt, i});
    AuditEntry e;
    e.ts = static_cast<std::int64_t>(i);
    e.seq = i;
    e.key = "K" + std::to_string(rng() % (records / 3 + 1));
    e.op = rng() % 2 ? Op::Insert : Op::Delete;
    (e.op == Op::Insert ? e.new_value : e.old_value) = canon("v" + std::to_string(rng() % 64));
    log.push_back(std::move(e));
  }
  const LogIndex index(log);

  PageStore store;
  for (std::size_t i = 0; i < records; ++i) store.insert(part_key(i), "value-" + std::to_string(i));
  const auto before_bytes = store.bytes();
  const auto before = carve_pages(before_bytes);
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(100.0 / std::max(percent, 0.01)));
  for (std::size_t p = 1; p < store.page_count(); p += stride) {
    const auto* page = before.find_page(p);
    if (page && !page->records.empty()) store.update(page->records.front().key, "changed");
  }
  const auto after = carve_pages(store.bytes());

  std::printf("%-34s %10s %10s %9s\n", "kernel (median ms)", "serial", "parallel", "speedup");
  row("single-mode reconcile",
      median_ms([&] { reconcile_single(carved, index, Exec::Serial); }),
      median_ms([&] { reconcile_single(carved, index, Exec::Parallel); }));
  row("page carve + md5",
      median_ms([&] { carve_pages(before_bytes, Exec::Serial); }),
      median_ms([&] { carve_pages(before_bytes, Exec::Parallel); }));
  row("compare, exhaustive",
      median_ms([&] { compare_and_attribute(before, after, index, {false, false, Exec::Serial}); }),
      median_ms([&] { compare_and_attribute(before, after, index, {false, false, Exec::Parallel}); }));
  row("compare, hash-screened",
      median_ms([&] { compare_and_attribute(before, after, index, {false, true, Exec::Serial}); }),
      median_ms([&] { compare_and_attribute(before, after, index, {false, true, Exec::Parallel}); }));

  const double full = median_ms([&] { compare_and_attribute(before, after, index, {false, false, Exec::Parallel}); });
  const double screened = median_ms([&] { compare_and_attribute(before, after, index, {false, true, Exec::Parallel}); });
  std::printf("\nscreening speedup over %zu pages: %.1fx\n", before.pages.size(), full / screened);
  return 0;
}
