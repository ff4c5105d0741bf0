// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "generators.hpp"
#include "logrecon/audit_log.hpp"
#include "logrecon/carved.hpp"
#include "logrecon/recon_compare.hpp"
#include "logrecon/recon_single.hpp"
#include "logrecon/testbench/append_store.hpp"
#include "logrecon/testbench/dataset.hpp"
#include "logrecon/testbench/page_store.hpp"
#include "logrecon/testbench/scenarios.hpp"
#include "logrecon/testbench/workload.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace logrecon;
using namespace logrecon::testbench;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    out_.pass = false;
    if (!out_.detail.empty()) out_.detail += "; ";
    out_.detail += what;
  }
  void info(const std::string& what) { info_ += (info_.empty() ? "" : ", ") + what; }
  Outcome done() {
    if (out_.pass) out_.detail = info_;
    return out_;
  }

 private:
  Outcome out_;
  std::string info_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int prec = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

using KV = std::pair<std::string, std::string>;

std::set<KV> kvs(const std::vector<CarvedRecord>& rs) {
  std::set<KV> out;
  for (const auto& r : rs) out.insert({r.key, r.value.text});
  return out;
}

std::set<std::string> keys(const std::vector<CarvedRecord>& rs) {
  std::set<std::string> out;
  for (const auto& r : rs) out.insert(r.key);
  return out;
}

std::set<std::string> upd_keys(const std::vector<UpdatePair>& ps) {
  std::set<std::string> out;
  for (const auto& p : ps) out.insert(p.active.key);
  return out;
}

std::set<std::string> key_range(const std::function<std::string(std::uint64_t)>& f, std::uint64_t lo, std::uint64_t hi) {
  std::set<std::string> out;
  for (auto i = lo; i <= hi; ++i) out.insert(f(i));
  return out;
}

std::string findings_text(const ReconReport& r) {
  std::ostringstream s;
  for (const auto& x : r.r_del) s << "D " << x.key << " " << x.value.text << "\n";
  for (const auto& x : r.r_ins) s << "I " << x.key << " " << x.value.text << "\n";
  for (const auto& p : r.r_upd) s << "U " << p.active.key << " " << p.deleted.value.text << " " << p.active.value.text << "\n";
  return s.str();
}

ReconReport single(const std::vector<CarvedRecord>& carved, const std::vector<AuditEntry>& log) {
  return reconcile_single(carved, LogIndex(log));
}

// 1. Key-value golden case.
Outcome criterion1() {
  Check c;
  const auto start = Clock::now();
  const auto report = single(parse_carved(fixture("fig4/carved.jsonl")).flat, parse_audit_log(fixture("fig4/audit.jsonl")));
  const double t = seconds_since(start);
  c.expect(kvs(report.r_del) == std::set<KV>{{"K004", "Plano"}}, "R_del mismatch");
  c.expect(kvs(report.r_ins) == std::set<KV>{{"K005", "Frisco"}}, "R_ins mismatch");
  c.expect(report.r_upd.size() == 1 && report.r_upd[0].deleted.key == "K006" &&
               report.r_upd[0].deleted.value.text == "Memphis" && report.r_upd[0].active.value.text == "Raston",
           "R_upd mismatch");
  c.expect(t < 1.0, "took " + fmt(t) + " s");
  c.info("R_del={(K004,Plano)} R_ins={(K005,Frisco)} R_upd={(K006,Memphis->Raston)} in " + fmt(t) + " s");
  return c.done();
}

// Rewrites every document value of a JSONL fixture with shuffled member order,
// random whitespace and a random choice of native or string encoding.
std::string reencode_fixture(const std::string& raw, gen::Rng& rng) {
  std::istringstream in(raw);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto obj = nlohmann::json::parse(line);
    std::vector<std::string> names;
    for (const auto& [k, _] : obj.items()) names.push_back(k);
    std::shuffle(names.begin(), names.end(), rng.engine());
    std::string text = "{";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) text += ",";
      text += nlohmann::json(names[i]).dump() + ":";
      nlohmann::json v = obj.at(names[i]);
      const bool value_field = names[i] == "value" || names[i] == "old_value" || names[i] == "new_value";
      if (value_field && v.is_string()) {
        auto parsed = nlohmann::json::parse(v.get<std::string>(), nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) v = parsed;
      }
      if (value_field && v.is_object()) {
        auto doc = gen::reencode(v, rng);
        if (rng.chance(0.5)) {
          // Inline documents must stay on one JSONL line.
          std::replace(doc.begin(), doc.end(), '\n', ' ');
          text += doc;
        } else {
          text += nlohmann::json(doc).dump();
        }
      } else {
        text += v.dump();
      }
    }
    out += text + "}\n";
  }
  return out;
}

// 2. Document golden case plus ten re-encodings.
Outcome criterion2() {
  Check c;
  const auto carved_raw = fixture("fig5/carved.jsonl");
  const auto log_raw = fixture("fig5/audit.jsonl");
  const auto report = single(parse_carved(carved_raw).flat, parse_audit_log(log_raw));
  c.expect(kvs(report.r_del) == std::set<KV>{{"K004", canon(R"({"City":"Plano","Name":"Diana"})").text}},
           "Diana/Plano delete missing");
  c.expect(kvs(report.r_ins) == std::set<KV>{{"K005", canon(R"({"City":"Frisco","Name":"Ethan"})").text}},
           "Ethan/Frisco insert missing");
  c.expect(report.r_upd.size() == 1 &&
               report.r_upd[0].deleted.value == canon(R"({"City":"Tulsa","Name":"Mike"})") &&
               report.r_upd[0].active.value == canon(R"({"City":"Tulsa","Name":"Michael"})"),
           "Mike->Michael update missing");
  const auto reference = findings_text(report);
  gen::Rng rng(2024);
  int identical = 0;
  for (int i = 0; i < 10; ++i) {
    const auto carved = reencode_fixture(carved_raw, rng);
    const auto log = reencode_fixture(log_raw, rng);
    c.expect(carved != carved_raw, "re-encoding " + std::to_string(i) + " left the carved file unchanged");
    if (findings_text(single(parse_carved(carved).flat, parse_audit_log(log))) == reference) ++identical;
  }
  c.expect(identical == 10, std::to_string(identical) + "/10 re-encodings matched");
  c.info("Diana/Plano delete, Ethan/Frisco insert, Mike->Michael update; 10/10 re-encodings identical");
  return c.done();
}

WorkloadResult run_scenario(const std::string& name) {
  const auto s = make_scenario(name);
  return run_workload(s.steps, s.engine);
}

// 3. Scenario A.
Outcome criterion3() {
  Check c;
  const auto r = run_scenario("exp2a");
  const auto start = Clock::now();
  const auto carved = carve_append(r.db);
  const auto report = single(carved.flat, r.logged);
  const double t = seconds_since(start);
  c.expect(keys(report.r_del) == key_range(customer_key, 121, 130) && report.r_del.size() == 10,
           "unattributed deletes are not exactly Customer#121-130 (" + std::to_string(report.r_del.size()) + ")");
  c.expect(report.attributed.deletes_matched == 21, "attributed deletes " + std::to_string(report.attributed.deletes_matched));
  c.expect(report.r_ins.empty() && report.r_upd.empty(), "unexpected inserts/updates");
  c.expect(t < 10.0, "took " + fmt(t) + " s");
  c.info("3000 customers, 10 unattributed deletes, 21 attributed, carve+reconcile " + fmt(t) + " s");
  return c.done();
}

// 4. Scenario B after pack.
Outcome criterion4() {
  Check c;
  const auto r = run_scenario("exp2b");
  const auto report = single(carve_append(r.db).flat, r.logged);
  c.expect(report.r_ins.size() == 2, std::to_string(report.r_ins.size()) + " unattributed inserts");
  c.expect(keys(report.r_ins) == std::set<std::string>{customer_key(200), "Customer#999999"}, "wrong insert keys");
  bool malicious = false, rogue = false;
  for (const auto& x : report.r_ins) {
    malicious |= x.key == customer_key(200) && x.value.text.find("MALICIOUS_UPDATE") != std::string::npos;
    rogue |= x.key == "Customer#999999" && x.value.text.find("ROGUE_AGENT") != std::string::npos;
  }
  c.expect(malicious && rogue, "insert values do not carry the tampered content");
  c.expect(report.r_upd.empty() && report.r_del.empty(), "updates/deletes reported after pack");
  c.info("2 unattributed inserts (Customer#000000200 MALICIOUS_UPDATE, Customer#999999 ROGUE_AGENT), 0 updates, 0 deletes");
  return c.done();
}

// 5. Copy-on-write at T1 (pinned) and T2 (after the burst).
Outcome criterion5() {
  Check c;
  const auto r = run_scenario("exp3");
  const auto snap = [&](const std::string& name) {
    for (const auto& [n, bytes] : r.snapshots) {
      if (n == name) return bytes;
    }
    return std::string();
  };
  const auto tampered = key_range(supplier_key, 221, 230);
  const auto t1 = single(carve_append(snap("T1")).flat, r.logged);
  c.expect(upd_keys(t1.r_upd) == tampered && t1.r_upd.size() == 10, "T1: unattributed updates are not exactly 221-230");
  c.expect(t1.attributed.updates_matched == 21, "T1: attributed updates " + std::to_string(t1.attributed.updates_matched));
  c.expect(t1.r_ins.empty() && t1.r_del.empty(), "T1: extra findings");
  const auto t2 = single(carve_append(snap("T2")).flat, r.logged);
  c.expect(keys(t2.r_ins) == tampered && t2.r_ins.size() == 10, "T2: unattributed inserts are not exactly 221-230");
  c.expect(t2.r_upd.empty() && t2.r_del.empty(), "T2: updates/deletes still reported");
  c.info("T1: 21 attributed + 10 unattributed updates; T2: the same 10 keys as inserts, 0 updates");
  return c.done();
}

// 6. In-place engine, compare mode, both value encodings.
Outcome criterion6() {
  Check c;
  for (const std::string name : {"exp4", "exp4-doc"}) {
    const auto r = run_scenario(name);
    if (r.snapshots.size() != 2) {
      c.expect(false, name + ": expected two snapshots");
      continue;
    }
    const auto& before_bytes = r.snapshots[0].second;
    const auto& after_bytes = r.snapshots[1].second;
    const auto before = carve_pages(before_bytes);
    const auto after = carve_pages(after_bytes);
    const auto report = compare_and_attribute(before, after, LogIndex(r.logged));

    c.expect(report.r_upd.size() == 1 && report.r_upd[0].active.key == part_key(500), name + ": update not found");
    if (report.r_upd.size() == 1) {
      c.expect(report.r_upd[0].deleted.value.text.find("azure spring") != std::string::npos &&
                   report.r_upd[0].active.value.text.find("SM PKG") != std::string::npos,
               name + ": wrong update values");
    }
    c.expect(report.r_del.empty() && report.r_ins.empty(), name + ": extra findings");
    c.expect(report.attributed.deletes_matched == 2, name + ": deletes not attributed");

    // Pages whose bytes differ, found by direct comparison of the two files.
    std::set<std::uint64_t> changed;
    const auto pages = std::max(before_bytes.size(), after_bytes.size()) / kPageSize;
    for (std::uint64_t p = 0; p < pages; ++p) {
      if (std::string_view(before_bytes).substr(p * kPageSize, kPageSize) !=
          std::string_view(after_bytes).substr(p * kPageSize, kPageSize)) {
        changed.insert(p);
      }
    }
    const auto& visited = report.screening->visited;
    const std::set<std::uint64_t> visited_set(visited.begin(), visited.end());
    std::set<std::uint64_t> data_visited;
    for (auto p : visited) {
      if (p != 0) data_visited.insert(p);
    }
    const CarvedPage* page_of_500 = nullptr;
    if (!report.r_upd.empty() && report.r_upd.front().active.page_id) {
      page_of_500 = after.find_page(*report.r_upd.front().active.page_id);
    }
    c.expect(visited_set == changed, name + ": visited pages differ from changed pages");
    c.expect(data_visited == std::set<std::uint64_t>{34} && page_of_500 && page_of_500->index == 34,
             name + ": changed data pages are not exactly {34}");
    c.info(name + ": 1 update on page 34, 2 deletes attributed, visited " + std::to_string(visited.size()) + "/" +
           std::to_string(report.screening->pages_total) + " pages (data: 34)");
  }
  return c.done();
}

// 7. Throughput smoke check and screening speedup.
Outcome criterion7() {
  Check c;
  {
    gen::Rng rng(7);
    const std::size_t n = 100000;
    std::string carved_raw, log_raw;
    for (std::size_t i = 0; i < n; ++i) {
      const auto key = "K" + std::to_string(rng.below(40000));
      const auto value = rng.chance(0.3) ? "{\"v\":" + std::to_string(rng.below(50)) + ",\"k\":\"" + key + "\"}"
                                         : "\"v" + std::to_string(rng.below(50)) + "\"";
      carved_raw += "{\"key\":\"" + key + "\",\"value\":" + value + ",\"status\":\"" +
                    (rng.chance(0.5) ? "Active" : "Deleted") + "\",\"version_seq\":" + std::to_string(i) + "}\n";
      const auto lkey = "K" + std::to_string(rng.below(40000));
      const auto lvalue = "\"v" + std::to_string(rng.below(50)) + "\"";
      switch (rng.below(3)) {
        case 0:
          log_raw += "{\"ts\":" + std::to_string(i) + ",\"op\":\"insert\",\"key\":\"" + lkey + "\",\"new_value\":" + lvalue + "}\n";
          break;
        case 1:
          log_raw += "{\"ts\":" + std::to_string(i) + ",\"op\":\"delete\",\"key\":\"" + lkey + "\",\"old_value\":" + lvalue + "}\n";
          break;
        default:
          log_raw += "{\"ts\":" + std::to_string(i) + ",\"op\":\"update\",\"key\":\"" + lkey + "\",\"old_value\":" + lvalue +
                     ",\"new_value\":\"w\"}\n";
      }
    }
    const auto start = Clock::now();
    const auto carved = parse_carved(carved_raw);
    const auto log = expand_field_ops(parse_audit_log(log_raw), {});
    const auto report = reconcile_single(carved.flat, LogIndex(log));
    const double t = seconds_since(start);
    c.expect(t < 60.0, "100k x 100k took " + fmt(t) + " s");
    c.info("100k carved x 100k log parse+reconcile " + fmt(t) + " s (" +
           std::to_string(report.r_del.size() + report.r_ins.size() + report.r_upd.size()) + " findings)");
  }
  {
    PageStore store;
    const std::size_t records = 150000;
    for (std::size_t i = 0; i < records; ++i) store.insert(part_key(i), "value-" + std::to_string(i));
    const auto before = carve_pages(store.bytes());
    // Edit one record on 2% of the data pages.
    const std::size_t data_pages = store.page_count() - 1;
    const std::size_t stride = 50;
    std::size_t edited = 0;
    for (std::size_t page = 1; page <= data_pages; page += stride) {
      const auto* p = before.find_page(page);
      if (!p || p->records.empty()) continue;
      store.update(p->records.front().key, "tampered-" + std::to_string(page));
      ++edited;
    }
    const auto after = carve_pages(store.bytes());
    const double fraction = static_cast<double>(edited) / static_cast<double>(data_pages);

    auto time_mode = [&](bool screen) {
      std::vector<double> runs;
      ReconReport report;
      for (int i = 0; i < 5; ++i) {
        const auto start = Clock::now();
        report = compare_and_attribute(before, after, LogIndex{}, {false, screen, Exec::Parallel});
        runs.push_back(seconds_since(start));
      }
      std::sort(runs.begin(), runs.end());
      return std::pair{runs[runs.size() / 2], report};
    };
    const auto [t_screen, r_screen] = time_mode(true);
    const auto [t_full, r_full] = time_mode(false);
    const double speedup = t_full / t_screen;
    c.expect(fraction < 0.05, "changed fraction " + fmt(fraction));
    c.expect(r_screen.r_upd.size() == edited && r_full.r_upd == r_screen.r_upd, "screened and exhaustive results differ");
    c.expect(speedup >= 5.0, "screening speedup only " + fmt(speedup, 1) + "x");
    c.info(std::to_string(data_pages) + " pages, " + fmt(fraction * 100, 1) + "% changed: screened " + fmt(t_screen * 1e3, 1) +
           " ms vs exhaustive " + fmt(t_full * 1e3, 1) + " ms (" + fmt(speedup, 1) + "x)");
  }
  return c.done();
}

// 8. Property suites, run from the unit test binary.
Outcome criterion8() {
  Check c;
  const std::string cmd = std::string(LOGRECON_TESTS) +
                          " --test-case='property:*,closure:*' --no-intro --no-version 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    c.expect(false, "cannot run unit test binary");
    return c.done();
  }
  std::string output;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) output.append(buf, n);
  const int status = pclose(pipe);
  const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;

  std::size_t cases = 0;
  if (auto at = output.find("test cases:"); at != std::string::npos) {
    cases = std::strtoul(output.c_str() + at + 11, nullptr, 10);
  }
  c.expect(ok, "property suites failed:\n" + output);
  // Canonicalization 2, single mode 5, compare mode 3, policy 2, engines and
  // replay 3, closure 5.
  c.expect(cases >= 20, "only " + std::to_string(cases) + " property/closure cases ran");
  c.info(std::to_string(cases) + " property and closure suites passed");
  return c.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"key-value golden case", criterion1},
      {"document golden case and re-encodings", criterion2},
      {"append engine, unlogged deletes", criterion3},
      {"append engine after pack", criterion4},
      {"copy-on-write pinned and burst snapshots", criterion5},
      {"in-place engine compare mode", criterion6},
      {"throughput and screening", criterion7},
      {"property suites", criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %zu: %s -- %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
