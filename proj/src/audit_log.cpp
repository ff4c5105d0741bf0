#include "logrecon/audit_log.hpp"

#include "logrecon/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <set>

namespace logrecon {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 5> kOpNames = {"insert", "delete", "update", "update_fields",
                                                      "delete_fields"};

bool read_digits(std::string_view text, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  const auto* first = text.data() + pos;
  const auto* last = first + count;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::all_of(first, last, [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<CanonicalValue> read_value(const json& obj, const char* name, std::size_t line) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  try {
    return canon_json(*it);
  } catch (const ParseError& e) {
    throw ParseError(line, std::string(name) + ": " + e.what());
  }
}

void check_value_shape(const AuditEntry& e, std::size_t line) {
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw ParseError(line, std::string(op_name(e.op)) + " entry " + what);
  };
  switch (e.op) {
    case Op::Insert:
      require(e.new_value && !e.old_value, "needs new_value and no old_value");
      break;
    case Op::Delete:
      require(e.old_value && !e.new_value, "needs old_value and no new_value");
      break;
    case Op::Update:
      require(e.old_value && e.new_value, "needs both old_value and new_value");
      break;
    case Op::UpdateFields:
      require(e.new_value && !e.old_value, "needs a partial document in new_value and no old_value");
      require(e.new_value->is_document() && e.new_value->text.front() == '{', "new_value must be an object");
      break;
    case Op::DeleteFields:
      require(e.old_value && !e.new_value, "needs field names in old_value and no new_value");
      require(e.old_value->is_document(), "old_value must list field names (array or object)");
      break;
  }
}

AuditEntry parse_line(std::string_view text, std::size_t seq, const AuditParseOptions& options) {
  const std::size_t line = seq + 1;
  json obj = json::parse(text.begin(), text.end(), nullptr, false);
  if (obj.is_discarded()) throw ParseError(line, "malformed JSON");
  if (!obj.is_object()) throw ParseError(line, "expected a JSON object");

  static const std::set<std::string, std::less<>> kFields = {"ts", "op", "key", "user", "old_value", "new_value"};
  for (const auto& [name, _] : obj.items()) {
    if (!kFields.contains(name)) throw ParseError(line, "unknown field '" + name + "'");
  }

  AuditEntry e;
  e.seq = seq;

  auto ts = obj.find("ts");
  if (ts == obj.end()) throw ParseError(line, "missing ts");
  if (ts->is_number_integer()) {
    e.ts = ts->get<std::int64_t>();
  } else if (ts->is_string()) {
    auto parsed = parse_rfc3339(ts->get_ref<const std::string&>());
    if (!parsed) throw ParseError(line, "ts is not RFC3339: " + ts->get<std::string>());
    e.ts = *parsed;
  } else {
    throw ParseError(line, "ts must be integer epoch seconds or an RFC3339 string");
  }

  auto op = obj.find("op");
  if (op == obj.end() || !op->is_string()) throw ParseError(line, "missing op");
  auto parsed_op = parse_op(op->get_ref<const std::string&>());
  if (!parsed_op) throw ParseError(line, "unknown op '" + op->get<std::string>() + "'");
  e.op = *parsed_op;

  auto key = obj.find("key");
  if (key == obj.end() || !key->is_string() || key->get_ref<const std::string&>().empty()) {
    throw ParseError(line, "key must be a non-empty string");
  }
  e.key = options.fold_keys ? fold_key(key->get_ref<const std::string&>()) : key->get<std::string>();

  auto user = obj.find("user");
  if (user != obj.end() && !user->is_null()) {
    if (!user->is_string()) throw ParseError(line, "user must be a string");
    e.user = user->get<std::string>();
  }

  e.old_value = read_value(obj, "old_value", line);
  e.new_value = read_value(obj, "new_value", line);
  check_value_shape(e, line);
  return e;
}

void append_json_string(std::string& out, const std::string& s) { out += json(s).dump(); }

void append_value(std::string& out, const std::optional<CanonicalValue>& v) {
  if (!v) {
    out += "null";
  } else if (v->is_document()) {
    out += v->text;
  } else {
    append_json_string(out, v->text);
  }
}

json::object_t require_object(const CanonicalValue& v, const std::string& key) {
  json doc = json::parse(v.text);
  if (!doc.is_object()) throw Error("field-level operation on key '" + key + "' whose document is not an object");
  return doc.get<json::object_t>();
}

// Unexpanded field-level entries carry partial values and never explain a
// whole carved value.
bool whole_value_op(Op op) { return op != Op::UpdateFields && op != Op::DeleteFields; }

}  // namespace

std::string_view op_name(Op op) { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<Op> parse_op(std::string_view token) {
  for (std::size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == token) return static_cast<Op>(i);
  }
  return std::nullopt;
}

OpClass op_class(Op op) {
  switch (op) {
    case Op::Insert:
      return OpClass::Insert;
    case Op::Delete:
      return OpClass::Delete;
    default:
      return OpClass::Update;
  }
}

std::optional<std::int64_t> parse_rfc3339(std::string_view t) {
  // YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)
  int year, month, day, hour, minute, second;
  if (t.size() < 20) return std::nullopt;
  if (!read_digits(t, 0, 4, year) || t[4] != '-' || !read_digits(t, 5, 2, month) || t[7] != '-' ||
      !read_digits(t, 8, 2, day)) {
    return std::nullopt;
  }
  if (t[10] != 'T' && t[10] != 't' && t[10] != ' ') return std::nullopt;
  if (!read_digits(t, 11, 2, hour) || t[13] != ':' || !read_digits(t, 14, 2, minute) || t[16] != ':' ||
      !read_digits(t, 17, 2, second)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  if (pos < t.size() && t[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    while (pos < t.size() && t[pos] >= '0' && t[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  if (pos >= t.size()) return std::nullopt;
  int offset_seconds = 0;
  if (t[pos] == 'Z' || t[pos] == 'z') {
    ++pos;
  } else if (t[pos] == '+' || t[pos] == '-') {
    int oh, om;
    if (!read_digits(t, pos + 1, 2, oh) || pos + 3 >= t.size() || t[pos + 3] != ':' ||
        !read_digits(t, pos + 4, 2, om) || oh > 23 || om > 59) {
      return std::nullopt;
    }
    offset_seconds = (oh * 3600 + om * 60) * (t[pos] == '-' ? -1 : 1);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != t.size()) return std::nullopt;

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;
  const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * 86400 + hour * 3600 + minute * 60 + second - offset_seconds;
}

std::vector<AuditEntry> parse_audit_log(std::string_view raw, const AuditParseOptions& options,
                                        std::vector<std::string>* warnings) {
  std::vector<AuditEntry> entries;
  std::size_t seq = 0;
  std::size_t start = 0;
  std::optional<std::int64_t> last_ts;
  while (start < raw.size()) {
    std::size_t end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = raw.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
    if (!blank) {
      AuditEntry e = parse_line(line, seq, options);
      if (last_ts && e.ts < *last_ts) {
        const std::string msg = "timestamp " + std::to_string(e.ts) + " is earlier than previous " +
                                std::to_string(*last_ts);
        if (options.strict_ts) throw ParseError(seq + 1, msg);
        if (warnings) warnings->push_back("line " + std::to_string(seq + 1) + ": " + msg);
      }
      last_ts = e.ts;
      entries.push_back(std::move(e));
    }
    ++seq;
    start = end + 1;
  }
  return entries;
}

std::string serialize_entry(const AuditEntry& e) {
  std::string out = "{\"ts\":" + std::to_string(e.ts) + ",\"op\":\"";
  out += op_name(e.op);
  out += "\",\"key\":";
  append_json_string(out, e.key);
  out += ",\"user\":";
  append_json_string(out, e.user);
  out += ",\"old_value\":";
  append_value(out, e.old_value);
  out += ",\"new_value\":";
  append_value(out, e.new_value);
  out += '}';
  return out;
}

std::string serialize_audit_log(std::span<const AuditEntry> entries) {
  std::string out;
  for (const auto& e : entries) {
    out += serialize_entry(e);
    out += '\n';
  }
  return out;
}

std::vector<AuditEntry> expand_field_ops(std::span<const AuditEntry> entries,
                                         const std::map<std::string, CanonicalValue>& base_state) {
  std::map<std::string, CanonicalValue> state = base_state;
  std::vector<AuditEntry> out;
  out.reserve(entries.size());
  std::set<std::string> missing;

  for (const auto& e : entries) {
    switch (e.op) {
      case Op::Insert:
      case Op::Update:
        state[e.key] = *e.new_value;
        out.push_back(e);
        break;
      case Op::Delete:
        state.erase(e.key);
        out.push_back(e);
        break;
      case Op::UpdateFields:
      case Op::DeleteFields: {
        auto it = state.find(e.key);
        if (it == state.end()) {
          missing.insert(e.key);
          break;
        }
        json::object_t doc = require_object(it->second, e.key);
        if (e.op == Op::UpdateFields) {
          for (auto& [field, value] : json::parse(e.new_value->text).get<json::object_t>()) doc[field] = value;
        } else {
          json names = json::parse(e.old_value->text);
          if (names.is_object()) {
            for (const auto& [field, _] : names.items()) doc.erase(field);
          } else {
            for (const auto& field : names) {
              if (!field.is_string()) throw Error("delete_fields on key '" + e.key + "' lists a non-string field");
              doc.erase(field.get<std::string>());
            }
          }
        }
        AuditEntry expanded = e;
        expanded.op = Op::Update;
        expanded.old_value = it->second;
        expanded.new_value = CanonicalValue{ValueKind::Document, canonical_dump(json(doc))};
        expanded.field_level = true;
        it->second = *expanded.new_value;
        out.push_back(std::move(expanded));
        break;
      }
    }
  }

  if (!missing.empty()) {
    std::string keys;
    for (const auto& k : missing) keys += (keys.empty() ? "" : ", ") + k;
    throw Error("field-level entries reference keys without a base document: " + keys);
  }
  return out;
}

LogIndex::LogIndex(std::vector<AuditEntry> entries) : entries_(std::move(entries)) {
  buckets_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& bucket = buckets_[entries_[i].key][static_cast<std::size_t>(op_class(entries_[i].op))];
    if (bucket.empty()) ++bucket_count_;
    bucket.push_back(i);
  }
  // Entries arrive in seq order from the parser, but callers may hand in any order.
  for (auto& [_, buckets] : buckets_) {
    for (auto& bucket : buckets) {
      std::stable_sort(bucket.begin(), bucket.end(),
                       [&](std::size_t a, std::size_t b) { return entries_[a].seq < entries_[b].seq; });
    }
  }
}

std::span<const std::size_t> LogIndex::bucket(const std::string& key, OpClass cls) const {
  auto it = buckets_.find(key);
  if (it == buckets_.end()) return {};
  return it->second[static_cast<std::size_t>(cls)];
}

std::optional<std::size_t> LogIndex::explain_deleted(const std::string& key, const CanonicalValue& value) const {
  auto it = buckets_.find(key);
  if (it == buckets_.end()) return std::nullopt;
  for (OpClass cls : {OpClass::Delete, OpClass::Update}) {
    for (std::size_t i : it->second[static_cast<std::size_t>(cls)]) {
      const auto& e = entries_[i];
      if (whole_value_op(e.op) && e.old_value && *e.old_value == value) return i;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> LogIndex::explain_active(const std::string& key, const CanonicalValue& value) const {
  auto it = buckets_.find(key);
  if (it == buckets_.end()) return std::nullopt;
  for (OpClass cls : {OpClass::Insert, OpClass::Update}) {
    for (std::size_t i : it->second[static_cast<std::size_t>(cls)]) {
      const auto& e = entries_[i];
      if (whole_value_op(e.op) && e.new_value && *e.new_value == value) return i;
    }
  }
  return std::nullopt;
}

}  // namespace logrecon
