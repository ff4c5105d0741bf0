#pragma once

#include <cstdint>
#include <string>

// Deterministic SSBM-style rows. Keys follow "Table#zero-padded-integer".
namespace logrecon::testbench {

std::string customer_key(std::uint64_t n);  // Customer#000000100
std::string supplier_key(std::uint64_t n);  // Supplier#000000200
std::string part_key(std::uint64_t n);      // part#000000500

// Pipe-delimited customer row. `nation` overrides the generated nation.
std::string customer_row(std::uint64_t n, std::uint64_t seed, const std::string& nation = "");

// Fixed-width supplier row (same length for every n and revision), so a
// revised row always fits the slot of an older one.
std::string supplier_row(std::uint64_t n, std::uint64_t seed, std::uint32_t revision = 0);

// Two-word part name, e.g. "azure spring".
std::string part_name(std::uint64_t n, std::uint64_t seed);
// Part row as a JSON document with P_Name and a few attributes.
std::string part_document(std::uint64_t n, std::uint64_t seed, const std::string& name);

}  // namespace logrecon::testbench
