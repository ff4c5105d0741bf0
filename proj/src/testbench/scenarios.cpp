#include "logrecon/testbench/scenarios.hpp"

#include "logrecon/error.hpp"
#include "logrecon/testbench/dataset.hpp"

#include <algorithm>
#include <cmath>

namespace logrecon::testbench {
namespace {

std::uint64_t scaled(double base, double scale, std::uint64_t floor) {
  return std::max<std::uint64_t>(floor, static_cast<std::uint64_t>(std::llround(base * scale)));
}

Step insert(std::string key, std::string value) { return {StepOp::Insert, std::move(key), std::move(value), true, {}}; }
Step update(std::string key, std::string value, bool logged) {
  return {StepOp::Update, std::move(key), std::move(value), logged, {}};
}
Step remove(std::string key, bool logged) { return {StepOp::Delete, std::move(key), std::nullopt, logged, {}}; }
Step simple(StepOp op) { return {op, {}, std::nullopt, true, {}}; }
Step snapshot(std::string name) { return {StepOp::Snapshot, {}, std::nullopt, true, std::move(name)}; }

// Customers loaded, 21 logged deletes (100-120), then 10 unlogged (121-130).
Scenario exp2a(const ScenarioParams& p) {
  Scenario s{"exp2a", Engine::Append, {}};
  const auto n = scaled(3000, p.scale, 130);
  for (std::uint64_t i = 1; i <= n; ++i) s.steps.push_back(insert(customer_key(i), customer_row(i, p.seed)));
  for (std::uint64_t i = 100; i <= 120; ++i) s.steps.push_back(remove(customer_key(i), true));
  for (std::uint64_t i = 121; i <= 130; ++i) s.steps.push_back(remove(customer_key(i), false));
  return s;
}

// Unlogged nation change on Customer#000000200 and an unlogged rogue insert,
// then pack erases every superseded revision.
Scenario exp2b(const ScenarioParams& p) {
  Scenario s{"exp2b", Engine::Append, {}};
  const auto n = scaled(3000, p.scale, 200);
  for (std::uint64_t i = 1; i <= n; ++i) {
    s.steps.push_back(insert(customer_key(i), customer_row(i, p.seed, i == 200 ? "GERMANY" : "")));
  }
  s.steps.push_back(update(customer_key(200), customer_row(200, p.seed, "MALICIOUS_UPDATE"), false));
  Step rogue = insert("Customer#999999", "Customer#999999|ROGUE_AGENT|NOWHERE|00-000-000-0000|MACHINERY");
  rogue.logged = false;
  s.steps.push_back(std::move(rogue));
  s.steps.push_back(simple(StepOp::Pack));
  return s;
}

// Pinned reader keeps superseded revisions alive at T1; after unpinning, a
// burst of 500 inserts reuses every reclaimable frame before T2.
Scenario exp3(const ScenarioParams& p) {
  Scenario s{"exp3", Engine::Cow, {}};
  const auto n = scaled(2000, p.scale, 230);
  for (std::uint64_t i = 1; i <= n; ++i) s.steps.push_back(insert(supplier_key(i), supplier_row(i, p.seed)));
  s.steps.push_back(simple(StepOp::OpenPinReader));
  for (std::uint64_t i = 200; i <= 220; ++i) s.steps.push_back(update(supplier_key(i), supplier_row(i, p.seed, 1), true));
  for (std::uint64_t i = 221; i <= 230; ++i) s.steps.push_back(update(supplier_key(i), supplier_row(i, p.seed, 1), false));
  s.steps.push_back(snapshot("T1"));
  s.steps.push_back(simple(StepOp::ClosePinReader));
  for (std::uint64_t i = 0; i < 500; ++i) {
    const std::uint64_t k = 20001 + i;
    s.steps.push_back(insert(supplier_key(k), supplier_row(k, p.seed)));
  }
  s.steps.push_back(snapshot("T2"));
  return s;
}

// In-place edit of part#000000500 between two snapshots, plus two logged
// deletes on the same page.
Scenario exp4(const ScenarioParams& p, bool documents) {
  Scenario s{documents ? "exp4-doc" : "exp4", Engine::Page, {}};
  const auto n = scaled(2000, p.scale, 502);
  auto value = [&](std::uint64_t i, const std::string& name) {
    return documents ? part_document(i, p.seed, name) : name;
  };
  for (std::uint64_t i = 1; i <= n; ++i) {
    s.steps.push_back(insert(part_key(i), value(i, i == 500 ? "azure spring" : part_name(i, p.seed))));
  }
  s.steps.push_back(snapshot("T1"));
  s.steps.push_back(update(part_key(500), value(500, "SM PKG"), false));
  s.steps.push_back(remove(part_key(501), true));
  s.steps.push_back(remove(part_key(502), true));
  s.steps.push_back(snapshot("T2"));
  return s;
}

}  // namespace

std::vector<std::string> scenario_names() { return {"exp2a", "exp2b", "exp3", "exp4", "exp4-doc"}; }

Scenario make_scenario(std::string_view name, const ScenarioParams& params) {
  if (!(params.scale > 0)) throw ConfigError("scale must be positive");
  if (name == "exp2a") return exp2a(params);
  if (name == "exp2b") return exp2b(params);
  if (name == "exp3") return exp3(params);
  if (name == "exp4") return exp4(params, false);
  if (name == "exp4-doc") return exp4(params, true);
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

}  // namespace logrecon::testbench
