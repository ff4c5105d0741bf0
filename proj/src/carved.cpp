#include "logrecon/carved.hpp"

#include "logrecon/digest.hpp"
#include "logrecon/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace logrecon {
namespace {

using nlohmann::json;

std::optional<std::uint64_t> read_unsigned(const json& obj, const char* name, std::size_t line) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer()) {
    throw ParseError(line, std::string(name) + " must be non-negative");
  }
  throw ParseError(line, std::string(name) + " must be an integer");
}

std::optional<std::string> read_md5(const json& obj, std::size_t line) {
  auto it = obj.find("page_md5");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(line, "page_md5 must be a string");
  std::string md5 = it->get<std::string>();
  std::transform(md5.begin(), md5.end(), md5.begin(), [](unsigned char c) { return std::tolower(c); });
  if (!digest::is_lower_hex(md5, 32)) throw ParseError(line, "page_md5 must be 32 hex characters");
  return md5;
}

void append_length_prefixed(std::string& out, std::string_view field) {
  const std::uint64_t n = field.size();
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
  out.append(field);
}

}  // namespace

std::string_view status_name(Status s) { return s == Status::Active ? "Active" : "Deleted"; }

std::optional<Status> parse_status(std::string_view token) {
  if (token == "Active") return Status::Active;
  if (token == "Deleted" || token == "Delete") return Status::Deleted;
  return std::nullopt;
}

const CarvedPage* CarvedSnapshot::find_page(std::uint64_t index) const {
  auto it = std::lower_bound(pages.begin(), pages.end(), index,
                             [](const CarvedPage& p, std::uint64_t i) { return p.index < i; });
  return it != pages.end() && it->index == index ? &*it : nullptr;
}

std::vector<CarvedRecord> CarvedSnapshot::unpaged() const {
  std::vector<CarvedRecord> out;
  for (const auto& r : flat) {
    if (!r.page_id) out.push_back(r);
  }
  return out;
}

bool CarvedSnapshot::fully_hashed() const {
  return !pages.empty() && std::all_of(pages.begin(), pages.end(), [](const CarvedPage& p) { return !p.md5.empty(); });
}

void SnapshotBuilder::declare_page(std::uint64_t index, const std::string& md5, std::size_t line) {
  auto [it, inserted] = pages_.try_emplace(index);
  if (inserted) {
    it->second.index = index;
    it->second.md5 = md5;
    return;
  }
  if (md5.empty()) return;
  if (it->second.md5.empty()) {
    it->second.md5 = md5;
  } else if (it->second.md5 != md5) {
    throw ParseError(line, "page " + std::to_string(index) + " declared with conflicting md5");
  }
}

void SnapshotBuilder::add(CarvedRecord record, std::size_t line) {
  if (record.page_id) {
    declare_page(*record.page_id, record.page_md5.value_or(""), line);
    pages_[*record.page_id].records.push_back(record);
  } else if (record.page_md5 || record.page_offset) {
    throw ParseError(line, "page metadata without page_id");
  }
  flat_.push_back(std::move(record));
}

CarvedSnapshot SnapshotBuilder::finish() && {
  CarvedSnapshot s;
  s.pages.reserve(pages_.size());
  for (auto& [_, page] : pages_) s.pages.push_back(std::move(page));
  s.flat = std::move(flat_);
  return s;
}

CarvedSnapshot parse_carved(std::string_view raw, const CarvedParseOptions& options) {
  static const std::set<std::string, std::less<>> kFields = {"key",      "value",       "status",     "page_id",
                                                             "page_md5", "page_offset", "version_seq"};
  SnapshotBuilder builder;
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

    auto page_id = read_unsigned(obj, "page_id", line_no);
    auto md5 = read_md5(obj, line_no);

    if (!obj.contains("key")) {
      if (!page_id || obj.contains("value") || obj.contains("status")) {
        throw ParseError(line_no, "record line without key");
      }
      builder.declare_page(*page_id, md5.value_or(""), line_no);
      continue;
    }

    CarvedRecord r;
    const json& key = obj["key"];
    if (!key.is_string() || key.get_ref<const std::string&>().empty()) {
      throw ParseError(line_no, "key must be a non-empty string");
    }
    r.key = options.fold_keys ? fold_key(key.get_ref<const std::string&>()) : key.get<std::string>();

    auto value = obj.find("value");
    if (value == obj.end() || value->is_null()) throw ParseError(line_no, "missing value");
    try {
      r.value = canon_json(*value);
    } catch (const ParseError& e) {
      throw ParseError(line_no, std::string("value: ") + e.what());
    }

    auto status = obj.find("status");
    if (status == obj.end() || !status->is_string()) throw ParseError(line_no, "missing status");
    auto parsed = parse_status(status->get_ref<const std::string&>());
    if (!parsed) throw ParseError(line_no, "unknown status '" + status->get<std::string>() + "'");
    r.status = *parsed;

    r.page_id = page_id;
    r.page_md5 = md5;
    r.page_offset = read_unsigned(obj, "page_offset", line_no);
    r.version_seq = read_unsigned(obj, "version_seq", line_no);
    builder.add(std::move(r), line_no);
  }
  return std::move(builder).finish();
}

std::string serialize_record(const CarvedRecord& r) {
  json::object_t obj;  // fixed key order is irrelevant here; dump sorts keys
  obj["key"] = r.key;
  obj["value"] = to_json(r.value);
  obj["status"] = std::string(status_name(r.status));
  if (r.page_id) obj["page_id"] = *r.page_id;
  if (r.page_md5) obj["page_md5"] = *r.page_md5;
  if (r.page_offset) obj["page_offset"] = *r.page_offset;
  if (r.version_seq) obj["version_seq"] = *r.version_seq;
  return canonical_dump(json(std::move(obj)));
}

std::string serialize_carved(const CarvedSnapshot& snapshot) {
  std::string out;
  for (const auto& page : snapshot.pages) {
    json::object_t obj;
    obj["page_id"] = page.index;
    if (!page.md5.empty()) obj["page_md5"] = page.md5;
    out += canonical_dump(json(std::move(obj)));
    out += '\n';
  }
  for (const auto& r : snapshot.flat) {
    out += serialize_record(r);
    out += '\n';
  }
  return out;
}

std::string fingerprint(const CarvedRecord& r) {
  std::string buf;
  buf.reserve(r.key.size() + r.value.text.size() + 40);
  append_length_prefixed(buf, r.key);
  buf.push_back(r.value.is_document() ? 'D' : 'S');
  append_length_prefixed(buf, r.value.text);
  buf.push_back(r.status == Status::Active ? 'A' : 'X');
  return digest::sha256_hex(buf);
}

}  // namespace logrecon
