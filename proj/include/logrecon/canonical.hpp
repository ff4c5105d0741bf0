#pragma once

#include "json.hpp"

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace logrecon {

enum class ValueKind { Scalar, Document };

// Comparison-safe value. Equality is byte equality of (kind, text).
//
// For documents `text` is the canonical serialization: object keys sorted by
// byte value at every level, no insignificant whitespace, integers without
// redundant zeros, integral floats folded to integers, other floats in
// shortest round-trip form. Scalars keep their bytes verbatim.
struct CanonicalValue {
  ValueKind kind = ValueKind::Scalar;
  std::string text;

  friend auto operator<=>(const CanonicalValue&, const CanonicalValue&) = default;
  friend bool operator==(const CanonicalValue&, const CanonicalValue&) = default;

  bool is_document() const noexcept { return kind == ValueKind::Document; }
};

struct CanonicalValueHash {
  std::size_t operator()(const CanonicalValue& v) const noexcept {
    return std::hash<std::string>{}(v.text) ^ (v.kind == ValueKind::Document ? 0x9e3779b97f4a7c15ULL : 0);
  }
};

// Canonicalizes raw text. The text is promoted to a document only when it
// parses completely as a JSON object or array; anything else is a scalar.
CanonicalValue canon(std::string_view raw);

// Canonicalizes text that must be a document. Throws ParseError naming the
// offending prefix when it does not parse as an object or array.
CanonicalValue canon_document(std::string_view raw);

// Canonicalizes an already parsed JSON value: strings go through canon(),
// objects/arrays become documents, numbers and booleans become scalars holding
// their JSON token. Throws ParseError for null.
CanonicalValue canon_json(const nlohmann::json& value);

// Canonical serialization of a parsed document (any JSON value).
std::string canonical_dump(const nlohmann::json& value);

// Inverse of canon_json for interchange output: scalar -> JSON string,
// document -> native JSON value.
nlohmann::json to_json(const CanonicalValue& value);

// ASCII case folding applied to correlation keys when --fold-keys is set.
std::string fold_key(std::string_view key);

}  // namespace logrecon
