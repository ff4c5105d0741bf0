// Ground-truth closure: findings on random workloads equal the suppressed-op
// ledger, up to the losses each engine's maintenance causes.
//
// Scripts keep unlogged operations terminal for their key (nothing touches the
// key afterwards), which is the shape of every tampering scenario: the forged
// state is the one left on disk.

#include "doctest.h"
#include "generators.hpp"
#include "logrecon/recon_compare.hpp"
#include "logrecon/recon_single.hpp"
#include "logrecon/testbench/append_store.hpp"
#include "logrecon/testbench/page_store.hpp"
#include "logrecon/testbench/workload.hpp"

#include <set>
#include <tuple>

using namespace logrecon;
using namespace logrecon::testbench;

namespace {

// (kind, key, old value, new value) with empty text for a missing side.
using Finding = std::tuple<char, std::string, std::string, std::string>;

std::set<Finding> findings(const ReconReport& r) {
  std::set<Finding> out;
  for (const auto& x : r.r_del) out.insert({'D', x.key, x.value.text, ""});
  for (const auto& x : r.r_ins) out.insert({'I', x.key, "", x.value.text});
  for (const auto& p : r.r_upd) out.insert({'U', p.active.key, p.deleted.value.text, p.active.value.text});
  return out;
}

std::string text(const std::optional<CanonicalValue>& v) { return v ? v->text : ""; }

std::size_t step_of(const AuditEntry& e) { return static_cast<std::size_t>(e.ts - kWorkloadEpoch); }

struct Script {
  std::vector<Step> steps;
  std::size_t before_snapshot = 0;  // page compare: index of the "before" snapshot step
};

class ScriptBuilder {
 public:
  ScriptBuilder(gen::Rng& rng, Engine engine) : rng_(rng), engine_(engine) {}

  // One data step on a random unfrozen key; `once` keys may be touched a single time.
  void data_step(std::set<std::string>* once) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      const auto key = "key" + std::to_string(rng_.below(40));
      if (frozen_.contains(key) || (once && once->contains(key))) continue;
      if (once) once->insert(key);
      Step s;
      s.key = key;
      s.logged = rng_.chance(0.75);
      const auto value = "v" + std::to_string(next_value_++);
      if (!live_.contains(key)) {
        s.op = StepOp::Insert;
        s.value = value;
        live_.insert(key);
      } else if (rng_.chance(0.6)) {
        s.op = StepOp::Update;
        s.value = value;
      } else {
        s.op = StepOp::Delete;
        live_.erase(key);
      }
      if (!s.logged) frozen_.insert(key);
      script_.steps.push_back(std::move(s));
      return;
    }
  }

  void maintenance_step() {
    Step s;
    switch (engine_) {
      case Engine::Append:
        s.op = StepOp::Pack;
        break;
      case Engine::Page:
        s.op = StepOp::Compact;
        break;
      case Engine::Cow:
        if (pinned_) {
          s.op = StepOp::ClosePinReader;
        } else if (rng_.chance(0.5)) {
          s.op = StepOp::OpenPinReader;
        } else {
          s.op = StepOp::Pack;
        }
        if (s.op != StepOp::Pack) pinned_ = !pinned_;
        break;
    }
    script_.steps.push_back(std::move(s));
  }

  Script single_mode(bool maintenance) {
    const auto n = 20 + rng_.below(150);
    for (std::uint64_t i = 0; i < n; ++i) {
      if (maintenance && rng_.chance(0.05)) {
        maintenance_step();
      } else {
        data_step(nullptr);
      }
    }
    return script_;
  }

  // Warm-up, snapshot "before", then a window where each key changes once.
  Script compare_mode() {
    const auto warm = 20 + rng_.below(120);
    for (std::uint64_t i = 0; i < warm; ++i) data_step(nullptr);
    script_.before_snapshot = script_.steps.size();
    Step snap;
    snap.op = StepOp::Snapshot;
    snap.name = "before";
    script_.steps.push_back(snap);
    std::set<std::string> once;
    const auto window = 1 + rng_.below(30);
    for (std::uint64_t i = 0; i < window; ++i) {
      if (rng_.chance(0.05)) {
        maintenance_step();
      } else {
        data_step(&once);
      }
    }
    return script_;
  }

 private:
  gen::Rng& rng_;
  Engine engine_;
  Script script_;
  std::set<std::string> live_, frozen_;
  std::uint64_t next_value_ = 0;
  bool pinned_ = false;
};

// Expected findings for one suppressed entry when its history survives.
void exact(const AuditEntry& e, std::set<Finding>& out) {
  switch (e.op) {
    case Op::Insert:
      out.insert({'I', e.key, "", text(e.new_value)});
      break;
    case Op::Update:
      out.insert({'U', e.key, text(e.old_value), text(e.new_value)});
      break;
    default:
      out.insert({'D', e.key, text(e.old_value), ""});
      break;
  }
}

// The same entry once its prior state has been erased: updates surface as
// inserts of the new value, deletes leave nothing behind.
void degraded(const AuditEntry& e, std::set<Finding>& out) {
  if (e.op == Op::Insert || e.op == Op::Update) out.insert({'I', e.key, "", text(e.new_value)});
}

std::size_t last_step_of(const std::vector<Step>& steps, StepOp op) {
  std::size_t last = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].op == op) last = i + 1;
  }
  return last;  // 0 when absent, otherwise one past the step
}

ReconReport single(const WorkloadResult& r, const CarvedSnapshot& carved) {
  return reconcile_single(carved.flat, LogIndex(r.logged));
}

}  // namespace

TEST_CASE("closure: append engine without maintenance is exact") {
  gen::Rng rng(1001);
  for (int round = 0; round < 100; ++round) {
    const auto script = ScriptBuilder(rng, Engine::Append).single_mode(false);
    const auto r = run_workload(script.steps, Engine::Append);
    std::set<Finding> want;
    for (const auto& e : r.suppressed) exact(e, want);
    CHECK(findings(single(r, carve_append(r.db))) == want);
  }
}

TEST_CASE("closure: append engine with pack degrades history written before the last pack") {
  gen::Rng rng(1002);
  for (int round = 0; round < 100; ++round) {
    const auto script = ScriptBuilder(rng, Engine::Append).single_mode(true);
    const auto r = run_workload(script.steps, Engine::Append);
    const auto packed_until = last_step_of(script.steps, StepOp::Pack);
    std::set<Finding> want;
    for (const auto& e : r.suppressed) {
      if (step_of(e) < packed_until) {
        degraded(e, want);
      } else {
        exact(e, want);
      }
    }
    CHECK(findings(single(r, carve_append(r.db))) == want);
  }
}

TEST_CASE("closure: cow engine form follows physical presence of the prior version") {
  gen::Rng rng(1003);
  std::size_t degraded_seen = 0, exact_seen = 0;
  for (int round = 0; round < 100; ++round) {
    const auto script = ScriptBuilder(rng, Engine::Cow).single_mode(true);
    const auto r = run_workload(script.steps, Engine::Cow);

    // Prior versions still physically in the file, read from the raw frames.
    std::set<std::pair<std::string, std::string>> on_disk;
    for (const auto& f : scan_append(r.db).frames) {
      if (f.op == FrameOp::Put) on_disk.insert({f.key, canon(f.value).text});
    }
    std::set<Finding> want;
    for (const auto& e : r.suppressed) {
      if (e.op == Op::Insert || on_disk.contains({e.key, text(e.old_value)})) {
        exact(e, want);
        ++exact_seen;
      } else {
        degraded(e, want);
        ++degraded_seen;
      }
    }
    CHECK(findings(single(r, carve_append(r.db))) == want);
  }
  // Both regimes must actually occur for this check to mean anything.
  CHECK(degraded_seen > 0);
  CHECK(exact_seen > 0);
}

TEST_CASE("closure: page engine in compare mode is exact over the window") {
  gen::Rng rng(1004);
  for (int round = 0; round < 100; ++round) {
    const auto script = ScriptBuilder(rng, Engine::Page).compare_mode();
    const auto r = run_workload(script.steps, Engine::Page);
    REQUIRE(r.snapshots.size() == 1);
    const auto report = compare_and_attribute(carve_pages(r.snapshots[0].second), carve_pages(r.db), LogIndex(r.logged));
    std::set<Finding> want;
    for (const auto& e : r.suppressed) {
      if (step_of(e) > script.before_snapshot) exact(e, want);
    }
    CHECK(findings(report) == want);
  }
}

TEST_CASE("closure: page engine in single mode keeps only current values") {
  gen::Rng rng(1005);
  for (int round = 0; round < 100; ++round) {
    const auto script = ScriptBuilder(rng, Engine::Page).single_mode(true);
    const auto r = run_workload(script.steps, Engine::Page);
    std::set<Finding> want;
    for (const auto& e : r.suppressed) degraded(e, want);
    CHECK(findings(single(r, carve_pages(r.db))) == want);
  }
}
