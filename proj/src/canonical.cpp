#include "logrecon/canonical.hpp"

#include "logrecon/error.hpp"

#include <cmath>
#include <cstdint>

namespace logrecon {
namespace {

using nlohmann::json;

// Integral floats inside this range serialize as integers so that 2.0 and 2
// compare equal; outside it doubles stop representing every integer.
constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

void write_string(const std::string& s, std::string& out) {
  try {
    out += json(s).dump(-1, ' ', false, json::error_handler_t::strict);
  } catch (const json::type_error& e) {
    throw ParseError(0, std::string("invalid UTF-8 in value: ") + e.what());
  }
}

void write_canonical(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::null:
      out += "null";
      break;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case json::value_t::number_float: {
      const double d = j.get<double>();
      if (std::isfinite(d) && std::trunc(d) == d && std::fabs(d) <= kMaxExactInteger) {
        out += std::to_string(static_cast<std::int64_t>(d));
      } else {
        out += j.dump();
      }
      break;
    }
    case json::value_t::string:
      write_string(j.get_ref<const std::string&>(), out);
      break;
    case json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : j) {
        if (!first) out.push_back(',');
        first = false;
        write_canonical(item, out);
      }
      out.push_back(']');
      break;
    }
    case json::value_t::object: {
      // object_t is an ordered std::map, so iteration is already byte-sorted.
      out.push_back('{');
      bool first = true;
      for (const auto& [key, item] : j.items()) {
        if (!first) out.push_back(',');
        first = false;
        write_string(key, out);
        out.push_back(':');
        write_canonical(item, out);
      }
      out.push_back('}');
      break;
    }
    case json::value_t::binary:
    case json::value_t::discarded:
      throw ParseError(0, "unsupported JSON value in document");
  }
}

bool may_be_document(std::string_view raw) {
  for (char c : raw) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '{' || c == '[';
  }
  return false;
}

}  // namespace

std::string canonical_dump(const json& value) {
  std::string out;
  write_canonical(value, out);
  return out;
}

CanonicalValue canon(std::string_view raw) {
  if (may_be_document(raw)) {
    json parsed = json::parse(raw.begin(), raw.end(), nullptr, false);
    if (!parsed.is_discarded() && (parsed.is_object() || parsed.is_array())) {
      return {ValueKind::Document, canonical_dump(parsed)};
    }
  }
  return {ValueKind::Scalar, std::string(raw)};
}

CanonicalValue canon_document(std::string_view raw) {
  json parsed;
  try {
    parsed = json::parse(raw.begin(), raw.end());
  } catch (const json::parse_error& e) {
    const std::size_t at = e.byte > 0 ? std::min<std::size_t>(e.byte, raw.size()) : 0;
    std::string prefix(raw.substr(0, at));
    if (prefix.size() > 64) prefix = "..." + prefix.substr(prefix.size() - 61);
    throw ParseError(0, "value is not a valid document near byte " + std::to_string(at) + ": '" + prefix + "'");
  }
  if (!parsed.is_object() && !parsed.is_array()) {
    throw ParseError(0, "value is not a document (object or array)");
  }
  return {ValueKind::Document, canonical_dump(parsed)};
}

CanonicalValue canon_json(const json& value) {
  switch (value.type()) {
    case json::value_t::string:
      return canon(value.get_ref<const std::string&>());
    case json::value_t::object:
    case json::value_t::array:
      return {ValueKind::Document, canonical_dump(value)};
    case json::value_t::boolean:
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
    case json::value_t::number_float:
      return {ValueKind::Scalar, canonical_dump(value)};
    default:
      throw ParseError(0, "null or unsupported value");
  }
}

json to_json(const CanonicalValue& value) {
  if (value.is_document()) return json::parse(value.text);
  return json(value.text);
}

std::string fold_key(std::string_view key) {
  std::string out(key);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace logrecon
