#include "logrecon/testbench/dataset.hpp"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <random>

namespace logrecon::testbench {
namespace {

constexpr std::array<const char*, 25> kNations = {
    "ALGERIA", "ARGENTINA", "BRAZIL",  "CANADA",  "EGYPT",          "ETHIOPIA",      "FRANCE",
    "GERMANY", "INDIA",     "INDONESIA", "IRAN",  "IRAQ",           "JAPAN",         "JORDAN",
    "KENYA",   "MOROCCO",   "MOZAMBIQUE", "PERU", "CHINA",          "ROMANIA",       "SAUDI ARABIA",
    "VIETNAM", "RUSSIA",    "UNITED KINGDOM", "UNITED STATES"};

constexpr std::array<const char*, 5> kSegments = {"AUTOMOBILE", "BUILDING", "FURNITURE", "HOUSEHOLD", "MACHINERY"};

constexpr std::array<const char*, 32> kColors = {
    "almond", "antique", "aquamarine", "azure",  "beige",   "bisque",   "black",  "blanched",
    "blue",   "blush",   "brown",      "burlywood", "chartreuse", "chiffon", "coral", "cornflower",
    "cream",  "cyan",    "dark",       "deep",   "dim",     "dodger",   "drab",   "firebrick",
    "forest", "frosted", "gainsboro",  "ghost",  "goldenrod", "green",  "honeydew", "spring"};

constexpr std::array<const char*, 5> kContainers = {"SM PKG", "LG BOX", "MED BAG", "JUMBO CASE", "WRAP DRUM"};

// Stream seeded per (table, row) so rows do not depend on generation order.
std::mt19937_64 row_rng(std::uint64_t table, std::uint64_t n, std::uint64_t seed) {
  std::seed_seq seq{table, n, seed};
  return std::mt19937_64(seq);
}

std::string padded(const char* table, std::uint64_t n) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s#%09llu", table, static_cast<unsigned long long>(n));
  return buf;
}

std::string letters(std::mt19937_64& rng, std::size_t len) {
  static constexpr char kAlpha[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out.push_back(kAlpha[rng() % (sizeof kAlpha - 1)]);
  return out;
}

std::string phone(std::mt19937_64& rng) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02u-%03u-%03u-%04u", static_cast<unsigned>(10 + rng() % 25),
                static_cast<unsigned>(100 + rng() % 900), static_cast<unsigned>(100 + rng() % 900),
                static_cast<unsigned>(1000 + rng() % 9000));
  return buf;
}

}  // namespace

std::string customer_key(std::uint64_t n) { return padded("Customer", n); }
std::string supplier_key(std::uint64_t n) { return padded("Supplier", n); }
std::string part_key(std::uint64_t n) { return padded("part", n); }

std::string customer_row(std::uint64_t n, std::uint64_t seed, const std::string& nation) {
  auto rng = row_rng(1, n, seed);
  const std::string address = letters(rng, 10 + rng() % 15);
  const std::string nat = nation.empty() ? kNations[rng() % kNations.size()] : nation;
  const std::string ph = phone(rng);
  const char* segment = kSegments[rng() % kSegments.size()];
  return customer_key(n) + "|" + address + "|" + nat + "|" + ph + "|" + segment;
}

std::string supplier_row(std::uint64_t n, std::uint64_t seed, std::uint32_t revision) {
  auto rng = row_rng(2, n, seed);
  const std::string address = letters(rng, 16);
  const std::string ph = phone(rng);
  char tail[32];
  std::snprintf(tail, sizeof tail, "|rev%06u", static_cast<unsigned>(revision % 1000000));
  return supplier_key(n) + "|" + address + "|" + ph + tail;
}

std::string part_name(std::uint64_t n, std::uint64_t seed) {
  auto rng = row_rng(3, n, seed);
  const char* a = kColors[rng() % kColors.size()];
  const char* b = kColors[rng() % kColors.size()];
  return std::string(a) + " " + b;
}

std::string part_document(std::uint64_t n, std::uint64_t seed, const std::string& name) {
  auto rng = row_rng(4, n, seed);
  nlohmann::json doc;
  doc["P_Name"] = name;
  doc["P_Mfgr"] = "MFGR#" + std::to_string(1 + rng() % 5);
  doc["P_Brand"] = "MFGR#" + std::to_string(1 + rng() % 5) + std::to_string(1 + rng() % 40);
  doc["P_Size"] = 1 + rng() % 50;
  doc["P_Container"] = kContainers[rng() % kContainers.size()];
  return doc.dump();
}

}  // namespace logrecon::testbench
