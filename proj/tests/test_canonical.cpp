#include "doctest.h"
#include "generators.hpp"
#include "logrecon/canonical.hpp"
#include "logrecon/error.hpp"

using namespace logrecon;

TEST_CASE("scalars keep their bytes") {
  CHECK(canon("Austin") == CanonicalValue{ValueKind::Scalar, "Austin"});
  CHECK(canon(" Austin ").text == " Austin ");
  CHECK(canon("").kind == ValueKind::Scalar);
  CHECK(canon("42").kind == ValueKind::Scalar);
  CHECK(canon("{not json").kind == ValueKind::Scalar);
  CHECK(canon("[1,2").kind == ValueKind::Scalar);
  CHECK(canon("{\"a\":1} trailing").kind == ValueKind::Scalar);
}

TEST_CASE("documents are sorted and compact") {
  const auto a = canon("{ \"Name\" : \"Diana\", \"City\": \"Plano\" }");
  CHECK(a.kind == ValueKind::Document);
  CHECK(a.text == R"({"City":"Plano","Name":"Diana"})");
  CHECK(canon(R"({"b":{"y":1,"x":[3, 2,{"q":0,"p":1}]},"a":null})").text ==
        R"({"a":null,"b":{"x":[3,2,{"p":1,"q":0}],"y":1}})");
  CHECK(canon(" [1, 2] ").text == "[1,2]");
}

TEST_CASE("integral floats fold to integers") {
  CHECK(canon(R"({"n":2.0})") == canon(R"({"n":2})"));
  CHECK(canon(R"({"n":-0.0})").text == R"({"n":0})");
  CHECK(canon(R"({"n":1e3})").text == R"({"n":1000})");
  CHECK(canon(R"({"n":2.5})").text == R"({"n":2.5})");
  CHECK(canon(R"({"n":1e300})").text != R"({"n":1})");
}

TEST_CASE("canon_document reports the offending prefix") {
  try {
    canon_document("{\"a\": 1,, }");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    CHECK(what.find("not a valid document") != std::string::npos);
    CHECK(what.find("{\"a\": 1,") != std::string::npos);
  }
  CHECK_THROWS_AS(canon_document("\"just a string\""), ParseError);
  CHECK(canon_document("[]").text == "[]");
}

TEST_CASE("canon_json maps JSON kinds") {
  using nlohmann::json;
  CHECK(canon_json(json("x")) == canon("x"));
  CHECK(canon_json(json::parse(R"({"b":1,"a":2})")).text == R"({"a":2,"b":1})");
  CHECK(canon_json(json(7)) == CanonicalValue{ValueKind::Scalar, "7"});
  CHECK(canon_json(json(true)) == CanonicalValue{ValueKind::Scalar, "true"});
  CHECK(canon_json(json(3.0)).text == "3");
  CHECK_THROWS_AS(canon_json(json(nullptr)), ParseError);
  // A string holding a document and the document itself compare equal.
  CHECK(canon_json(json(R"({"a":1})")) == canon_json(json::parse(R"({"a":1})")));
}

TEST_CASE("fold_key is ASCII only") {
  CHECK(fold_key("Customer#000000100") == "customer#000000100");
  CHECK(fold_key("ÄBC") == "Äbc");
}

TEST_CASE("property: canon is idempotent on 1000 random documents") {
  gen::Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto doc = gen::random_document(rng);
    const auto once = canon(doc.dump());
    REQUIRE(once.is_document());
    CHECK(canon(once.text) == once);
  }
}

TEST_CASE("property: key order and whitespace do not change canonical form") {
  gen::Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto doc = gen::random_document(rng);
    const auto reference = canon(doc.dump());
    const auto shuffled = gen::reencode(doc, rng);
    INFO(shuffled);
    CHECK(canon(shuffled) == reference);
  }
}
