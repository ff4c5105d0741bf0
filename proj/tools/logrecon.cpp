#include "CLI11.hpp"
#include "logrecon/audit_log.hpp"
#include "logrecon/carved.hpp"
#include "logrecon/digest.hpp"
#include "logrecon/error.hpp"
#include "logrecon/policy.hpp"
#include "logrecon/recon_compare.hpp"
#include "logrecon/recon_single.hpp"
#include "logrecon/report.hpp"
#include "logrecon/testbench/append_store.hpp"
#include "logrecon/testbench/page_store.hpp"
#include "logrecon/testbench/scenarios.hpp"
#include "logrecon/testbench/workload.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace logrecon;

constexpr int kExitClean = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitIo = 2;
constexpr int kExitFindings = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return buf.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

struct ReconcileArgs {
  std::string log;
  std::vector<std::string> carved;
  std::string mode = "single";
  std::string base_state;
  bool fold_keys = false;
  bool strict_ts = false;
  bool key_only = false;
  std::string format = "json";
  std::string out;
};

int cmd_reconcile(const ReconcileArgs& a) {
  const bool compare = a.mode == "compare";
  if (compare && a.carved.size() != 2) throw ConfigError("compare mode needs exactly two --carved inputs (before, after)");
  if (!compare && a.carved.size() != 1) throw ConfigError("single mode needs exactly one --carved input");
  if (!compare && a.key_only) throw ConfigError("--key-only-attribution applies to compare mode only");

  const std::string log_raw = read_file(a.log);
  std::vector<std::string> carved_raw;
  for (const auto& p : a.carved) carved_raw.push_back(read_file(p));

  std::vector<std::string> warnings;
  auto entries = parse_audit_log(log_raw, {a.fold_keys, a.strict_ts}, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  std::map<std::string, CanonicalValue> base;
  if (!a.base_state.empty()) {
    for (const auto& r : parse_carved(read_file(a.base_state), {a.fold_keys}).flat) {
      if (r.status == Status::Active) base[r.key] = r.value;
    }
  }
  LogIndex index(expand_field_ops(entries, base));

  std::vector<CarvedSnapshot> snaps;
  for (const auto& raw : carved_raw) snaps.push_back(parse_carved(raw, {a.fold_keys}));

  ReconReport report = compare ? compare_and_attribute(snaps[0], snaps[1], index, {a.key_only, true, Exec::Parallel})
                               : reconcile_single(snaps[0].flat, index);
  report.provenance.log_sha256 = digest::sha256_hex(log_raw);
  for (const auto& raw : carved_raw) report.provenance.carved_sha256.push_back(digest::sha256_hex(raw));

  emit(a.out, a.format == "text" ? report_text(report) : report_json(report));
  return report.has_findings() ? kExitFindings : kExitClean;
}

int cmd_classify(const std::string& events, const std::string& out) {
  const std::string raw = read_file(events);
  std::string result;
  std::istringstream lines(raw);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::optional<std::string> id;
    const FileWriteEvent e = parse_event(line, line_no, &id);
    result += decision_json(classify_event(e), id);
    result += '\n';
  }
  emit(out, result);
  return kExitClean;
}

struct WorkloadArgs {
  std::string scenario;
  std::string script;
  std::string engine;
  std::string out;
  double scale = 1.0;
  std::uint64_t seed = 7;
};

int cmd_workload(const WorkloadArgs& a) {
  using namespace logrecon::testbench;
  if (a.scenario.empty() == a.script.empty()) throw ConfigError("give exactly one of --scenario or --script");

  std::vector<Step> steps;
  Engine engine = Engine::Append;
  if (!a.scenario.empty()) {
    Scenario s = make_scenario(a.scenario, {a.scale, a.seed});
    steps = std::move(s.steps);
    engine = s.engine;
    if (!a.engine.empty() && parse_engine(a.engine) != engine) {
      throw ConfigError("scenario " + a.scenario + " runs on the " + std::string(engine_name(engine)) + " engine");
    }
  } else {
    if (a.engine.empty()) throw ConfigError("--script needs --engine append|cow|page");
    auto e = parse_engine(a.engine);
    if (!e) throw ConfigError("unknown engine '" + a.engine + "'");
    engine = *e;
    steps = parse_script(read_file(a.script));
  }
  write_workload(run_workload(steps, engine), a.out);
  return kExitClean;
}

int cmd_carve(const std::string& db, const std::string& out) {
  const std::string bytes = read_file(db);
  CarvedSnapshot snap;
  if (testbench::is_append_store(bytes)) {
    std::vector<std::string> warnings;
    snap = testbench::carve_append(bytes, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  } else if (testbench::is_page_store(bytes)) {
    snap = testbench::carve_pages(bytes);
  } else {
    throw ParseError(0, db + " is neither an append store nor a page store");
  }
  emit(out, serialize_carved(snap));
  return kExitClean;
}

int cmd_normalize(const std::string& log, const std::string& carved, bool fold_keys, const std::string& out) {
  if (log.empty() == carved.empty()) throw ConfigError("give exactly one of --log or --carved");
  if (!log.empty()) {
    std::vector<std::string> warnings;
    auto entries = parse_audit_log(read_file(log), {fold_keys, false}, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    emit(out, serialize_audit_log(entries));
  } else {
    emit(out, serialize_carved(parse_carved(read_file(carved), {fold_keys})));
  }
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconcile application audit logs against carved storage"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(logrecon::kToolVersion));

  ReconcileArgs rec;
  auto* reconcile = app.add_subcommand("reconcile", "Report storage changes the audit log does not explain");
  reconcile->add_option("--log", rec.log, "Audit log (JSONL)")->required();
  reconcile->add_option("--carved", rec.carved, "Carved interchange file(s); two for compare mode")
      ->required()
      ->expected(1, 2);
  reconcile->add_option("--mode", rec.mode, "single or compare")->check(CLI::IsMember({"single", "compare"}));
  reconcile->add_option("--base-state", rec.base_state, "Carved file whose Active records seed field-level expansion");
  reconcile->add_flag("--fold-keys", rec.fold_keys, "ASCII case-fold keys on both sides");
  reconcile->add_flag("--strict-ts", rec.strict_ts, "Reject non-monotone audit timestamps");
  reconcile->add_flag("--key-only-attribution", rec.key_only, "Compare mode: match on (key, op class) only");
  reconcile->add_option("--report-format", rec.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  reconcile->add_option("-o,--output", rec.out, "Report path (default stdout)");

  std::string events, classify_out;
  auto* classify = app.add_subcommand("classify", "Classify file-write events into snapshot actions");
  classify->add_option("--events", events, "Events (JSONL)")->required();
  classify->add_option("-o,--output", classify_out, "Decisions path (default stdout)");

  WorkloadArgs wl;
  auto* workload = app.add_subcommand("workload", "Run a testbench scenario or script");
  workload->add_option("--scenario", wl.scenario, "exp2a, exp2b, exp3, exp4 or exp4-doc");
  workload->add_option("--script", wl.script, "Workload script (JSONL)");
  workload->add_option("--engine", wl.engine, "append, cow or page");
  workload->add_option("--out", wl.out, "Output directory")->required();
  workload->add_option("--scale", wl.scale, "Row count multiplier for scenarios");
  workload->add_option("--seed", wl.seed, "Dataset seed");

  std::string db, carve_out;
  auto* carve = app.add_subcommand("carve", "Carve a testbench store into the interchange format");
  carve->add_option("--db", db, "Store file")->required();
  carve->add_option("-o,--output", carve_out, "Interchange path (default stdout)");

  std::string norm_log, norm_carved, norm_out;
  bool norm_fold = false;
  auto* normalize = app.add_subcommand("normalize", "Rewrite a log or carved file in canonical form");
  normalize->add_option("--log", norm_log, "Audit log (JSONL)");
  normalize->add_option("--carved", norm_carved, "Carved interchange file");
  normalize->add_flag("--fold-keys", norm_fold, "ASCII case-fold keys");
  normalize->add_option("-o,--output", norm_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitClean : kExitBadInput;
  }

  try {
    if (*reconcile) return cmd_reconcile(rec);
    if (*classify) return cmd_classify(events, classify_out);
    if (*workload) return cmd_workload(wl);
    if (*carve) return cmd_carve(db, carve_out);
    if (*normalize) return cmd_normalize(norm_log, norm_carved, norm_fold, norm_out);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
