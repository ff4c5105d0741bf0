#include "logrecon/testbench/workload.hpp"

#include "logrecon/error.hpp"
#include "logrecon/testbench/append_store.hpp"
#include "logrecon/testbench/page_store.hpp"

#include <array>
#include <fstream>
#include <set>
#include <variant>

namespace logrecon::testbench {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<StepOp, std::string_view>, 10> kStepOps = {{
    {StepOp::Insert, "insert"},
    {StepOp::Update, "update"},
    {StepOp::Delete, "delete"},
    {StepOp::UpdateFields, "update_fields"},
    {StepOp::DeleteFields, "delete_fields"},
    {StepOp::Pack, "pack"},
    {StepOp::Compact, "compact"},
    {StepOp::Snapshot, "snapshot"},
    {StepOp::OpenPinReader, "open_pin_reader"},
    {StepOp::ClosePinReader, "close_pin_reader"},
}};

bool needs_key(StepOp op) { return op <= StepOp::DeleteFields; }

bool valid_snapshot_name(const std::string& name) {
  if (name.empty() || name == "." || name == "..") return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

json parse_json_object(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  return j.is_object() ? j : json();
}

// Storage-facing wrapper over the two engines.
class Backend {
 public:
  explicit Backend(Engine kind) : kind_(kind) {
    if (kind == Engine::Page) {
      store_ = PageStore();
    } else {
      store_ = AppendStore(kind == Engine::Cow);
    }
  }

  void insert(const std::string& k, const std::string& v) {
    if (auto* p = std::get_if<PageStore>(&store_)) return p->insert(k, v);
    std::get<AppendStore>(store_).put(k, v);
  }
  void update(const std::string& k, const std::string& v) {
    if (auto* p = std::get_if<PageStore>(&store_)) return p->update(k, v);
    std::get<AppendStore>(store_).put(k, v);
  }
  void remove(const std::string& k) {
    if (auto* p = std::get_if<PageStore>(&store_)) return p->remove(k);
    std::get<AppendStore>(store_).tombstone(k);
  }
  AppendStore* append() { return std::get_if<AppendStore>(&store_); }
  PageStore* page() { return std::get_if<PageStore>(&store_); }
  Engine kind() const { return kind_; }

  std::string bytes() const {
    if (auto* p = std::get_if<PageStore>(&store_)) return p->bytes();
    return std::get<AppendStore>(store_).bytes();
  }

 private:
  Engine kind_;
  std::variant<AppendStore, PageStore> store_;
};

}  // namespace

std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::Append:
      return "append";
    case Engine::Cow:
      return "cow";
    case Engine::Page:
      break;
  }
  return "page";
}

std::optional<Engine> parse_engine(std::string_view name) {
  if (name == "append") return Engine::Append;
  if (name == "cow") return Engine::Cow;
  if (name == "page") return Engine::Page;
  return std::nullopt;
}

std::string_view step_op_name(StepOp op) {
  for (const auto& [o, n] : kStepOps) {
    if (o == op) return n;
  }
  return "?";
}

std::vector<Step> parse_script(std::string_view raw) {
  static const std::set<std::string, std::less<>> kFields = {"op", "key", "value", "logged", "name"};
  std::vector<Step> steps;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < raw.size()) {
    std::size_t end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = raw.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json obj = json::parse(line.begin(), line.end(), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ParseError(line_no, "malformed JSON object");
    for (const auto& [name, _] : obj.items()) {
      if (!kFields.contains(name)) throw ParseError(line_no, "unknown field '" + name + "'");
    }

    Step s;
    auto op = obj.find("op");
    if (op == obj.end() || !op->is_string()) throw ParseError(line_no, "missing op");
    bool found = false;
    for (const auto& [o, n] : kStepOps) {
      if (n == op->get_ref<const std::string&>()) {
        s.op = o;
        found = true;
      }
    }
    if (!found) throw ParseError(line_no, "unknown op '" + op->get<std::string>() + "'");

    if (auto key = obj.find("key"); key != obj.end()) {
      if (!key->is_string()) throw ParseError(line_no, "key must be a string");
      s.key = key->get<std::string>();
    }
    if (auto value = obj.find("value"); value != obj.end() && !value->is_null()) {
      s.value = value->is_string() ? value->get<std::string>() : value->dump();
    }
    if (auto logged = obj.find("logged"); logged != obj.end()) {
      if (!logged->is_boolean()) throw ParseError(line_no, "logged must be a boolean");
      s.logged = logged->get<bool>();
    }
    if (auto name = obj.find("name"); name != obj.end()) {
      if (!name->is_string()) throw ParseError(line_no, "name must be a string");
      s.name = name->get<std::string>();
    }
    steps.push_back(std::move(s));
  }
  return steps;
}

std::string serialize_script(std::span<const Step> steps) {
  std::string out;
  for (const Step& s : steps) {
    json j;
    j["op"] = std::string(step_op_name(s.op));
    if (!s.key.empty()) j["key"] = s.key;
    if (s.value) j["value"] = *s.value;
    if (!s.logged) j["logged"] = false;
    if (!s.name.empty()) j["name"] = s.name;
    out += j.dump();
    out += '\n';
  }
  return out;
}

WorkloadResult run_workload(std::span<const Step> steps, Engine engine) {
  Backend store(engine);
  WorkloadResult result;
  std::map<std::string, std::string>& state = result.final_state;
  std::set<std::string> snapshot_names;

  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Step& s = steps[i];
    auto fail = [&](const std::string& why) -> StepError {
      return StepError(i, std::string(step_op_name(s.op)) + (s.key.empty() ? "" : " " + s.key) + ": " + why);
    };
    if (needs_key(s.op) && s.key.empty()) throw fail("missing key");
    const bool exists = state.contains(s.key);

    AuditEntry entry;
    entry.ts = kWorkloadEpoch + static_cast<std::int64_t>(i);
    entry.key = s.key;
    entry.user = std::string(kWorkloadUser);

    try {
      switch (s.op) {
        case StepOp::Insert:
          if (exists) throw fail("key already present");
          if (!s.value) throw fail("missing value");
          store.insert(s.key, *s.value);
          entry.op = Op::Insert;
          entry.new_value = canon(*s.value);
          state[s.key] = *s.value;
          break;
        case StepOp::Update:
          if (!exists) throw fail("key not present");
          if (!s.value) throw fail("missing value");
          store.update(s.key, *s.value);
          entry.op = Op::Update;
          entry.old_value = canon(state[s.key]);
          entry.new_value = canon(*s.value);
          state[s.key] = *s.value;
          break;
        case StepOp::Delete:
          if (!exists) throw fail("key not present");
          store.remove(s.key);
          entry.op = Op::Delete;
          entry.old_value = canon(state[s.key]);
          state.erase(s.key);
          break;
        case StepOp::UpdateFields:
        case StepOp::DeleteFields: {
          if (!exists) throw fail("key not present");
          if (!s.value) throw fail("missing value");
          json doc = parse_json_object(state[s.key]);
          if (doc.is_null()) throw fail("stored value is not a JSON object");
          json arg = json::parse(*s.value, nullptr, false);
          if (s.op == StepOp::UpdateFields) {
            if (!arg.is_object()) throw fail("value must be a JSON object patch");
            for (const auto& [f, v] : arg.items()) doc[f] = v;
            entry.op = Op::UpdateFields;
            entry.new_value = canon_document(*s.value);
          } else {
            if (!arg.is_array()) throw fail("value must be a JSON array of field names");
            for (const auto& f : arg) {
              if (!f.is_string()) throw fail("field names must be strings");
              doc.erase(f.get<std::string>());
            }
            entry.op = Op::DeleteFields;
            entry.old_value = canon_document(*s.value);
          }
          const std::string text = canonical_dump(doc);
          store.update(s.key, text);
          state[s.key] = text;
          break;
        }
        case StepOp::Pack:
          if (!store.append()) throw fail("pack needs the append or cow engine");
          store.append()->pack();
          continue;
        case StepOp::Compact:
          if (!store.page()) throw fail("compact needs the page engine");
          store.page()->compact();
          continue;
        case StepOp::Snapshot:
          if (!valid_snapshot_name(s.name)) throw fail("snapshot name must match [A-Za-z0-9_.-]+");
          if (!snapshot_names.insert(s.name).second) throw fail("duplicate snapshot name " + s.name);
          result.snapshots.emplace_back(s.name, store.bytes());
          continue;
        case StepOp::OpenPinReader:
          if (engine != Engine::Cow) throw fail("reader pinning needs the cow engine");
          store.append()->open_pin_reader();
          continue;
        case StepOp::ClosePinReader:
          if (engine != Engine::Cow) throw fail("reader pinning needs the cow engine");
          store.append()->close_pin_reader();
          continue;
      }
    } catch (const StepError&) {
      throw;
    } catch (const Error& e) {
      throw fail(e.what());
    }

    auto& sink = s.logged ? result.logged : result.suppressed;
    entry.seq = sink.size();
    sink.push_back(std::move(entry));
  }
  result.db = store.bytes();
  return result;
}

void write_workload(const WorkloadResult& result, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  auto write = [](const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
  };
  write(dir / "store.db", result.db);
  write(dir / "audit.jsonl", result.audit_log());
  write(dir / "ledger.jsonl", result.ledger());
  if (!result.snapshots.empty()) {
    fs::create_directories(dir / "snapshots", ec);
    if (ec) throw IoError("cannot create snapshots directory: " + ec.message());
    for (const auto& [name, bytes] : result.snapshots) write(dir / "snapshots" / (name + ".db"), bytes);
  }
}

}  // namespace logrecon::testbench
