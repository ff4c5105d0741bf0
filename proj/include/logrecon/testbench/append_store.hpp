#pragma once

#include "logrecon/carved.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Append-only store with an optional copy-on-write reuse emulation. The byte
// layout is documented in docs/formats.md.
namespace logrecon::testbench {

inline constexpr std::string_view kAppendMagic = "RDRAPND1";
inline constexpr std::uint32_t kAppendVersion = 1;
inline constexpr std::uint32_t kAppendFlagCow = 1;
inline constexpr std::size_t kAppendHeaderSize = 16;
// seq u64, op u8, key_len u32, value_len u32, pad_len u32, header crc u32, ..., frame crc u32
inline constexpr std::size_t kFrameHeaderSize = 25;
inline constexpr std::size_t kFrameOverhead = kFrameHeaderSize + 4;

enum class FrameOp : std::uint8_t { Put = 1, Tombstone = 2 };

struct Frame {
  std::uint64_t offset = 0;
  std::uint64_t seq = 0;
  FrameOp op = FrameOp::Put;
  std::string key;
  std::string value;  // empty for tombstones
  std::uint32_t pad_len = 0;

  std::size_t size() const { return kFrameOverhead + key.size() + value.size() + pad_len; }
};

struct AppendScan {
  bool cow = false;
  std::vector<Frame> frames;  // file order
  std::vector<std::string> warnings;
};

bool is_append_store(std::string_view bytes);

// Validates the header and every frame. A trailing frame cut short is dropped
// with a warning; any checksum mismatch throws CorruptionError.
AppendScan scan_append(std::string_view bytes);

std::string encode_frame(const Frame& frame);

class AppendStore {
 public:
  explicit AppendStore(bool cow = false);

  bool cow() const { return cow_; }

  // Writes a put frame. The caller enforces insert/update semantics.
  void put(const std::string& key, const std::string& value);
  void tombstone(const std::string& key);
  // Rewrites the store with one frame per live key, seq renumbered from 0.
  void pack();
  void open_pin_reader();
  void close_pin_reader();

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& live() const { return live_; }
  std::string bytes() const;

 private:
  struct Slot {
    Frame frame;
    std::size_t capacity;  // bytes occupied in the file, frame plus padding
  };

  void write(Frame frame);
  void release(std::optional<std::size_t> slot);
  std::optional<std::size_t> latest_slot(const std::string& key) const;

  bool cow_;
  bool pinned_ = false;
  std::uint64_t next_seq_ = 0;
  std::vector<Slot> slots_;                      // file order
  std::map<std::string, std::size_t> latest_;    // key -> slot holding its latest frame
  std::map<std::string, std::string> live_;
  std::deque<std::size_t> reclaimable_;          // slot indices, oldest first
  std::vector<std::size_t> held_by_reader_;      // superseded while pinned
};

// Pack applied to raw file bytes.
std::string pack_append_store(std::string_view bytes);

// Latest put of each live key becomes Active; every other put becomes Deleted
// with version_seq set to its frame seq. Records are emitted in seq order.
CarvedSnapshot carve_append(std::string_view bytes, std::vector<std::string>* warnings = nullptr);

}  // namespace logrecon::testbench
