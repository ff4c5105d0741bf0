#include "logrecon/testbench/append_store.hpp"

#include "bytes.hpp"
#include "logrecon/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace logrecon::testbench {
namespace {

using detail::crc;
using detail::get_le;
using detail::put_le;

std::string header(bool cow) {
  std::string out(kAppendMagic);
  put_le<std::uint32_t>(out, kAppendVersion);
  put_le<std::uint32_t>(out, cow ? kAppendFlagCow : 0);
  return out;
}

// Index of the last frame (highest seq) for every key.
std::unordered_map<std::string, std::size_t> last_frames(const std::vector<Frame>& frames) {
  std::unordered_map<std::string, std::size_t> last;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    auto [it, inserted] = last.try_emplace(frames[i].key, i);
    if (!inserted && frames[it->second].seq < frames[i].seq) it->second = i;
  }
  return last;
}

std::vector<std::size_t> seq_order(const std::vector<Frame>& frames) {
  std::vector<std::size_t> order(frames.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frames[a].seq < frames[b].seq; });
  return order;
}

}  // namespace

bool is_append_store(std::string_view bytes) { return bytes.substr(0, kAppendMagic.size()) == kAppendMagic; }

std::string encode_frame(const Frame& f) {
  std::string out;
  out.reserve(f.size());
  put_le<std::uint64_t>(out, f.seq);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(f.op));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.key.size()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.value.size()));
  put_le<std::uint32_t>(out, f.pad_len);
  put_le<std::uint32_t>(out, crc(out));
  out += f.key;
  out += f.value;
  out.append(f.pad_len, '\0');
  put_le<std::uint32_t>(out, crc(out));
  return out;
}

AppendScan scan_append(std::string_view bytes) {
  if (bytes.size() < kAppendHeaderSize || !is_append_store(bytes)) {
    throw CorruptionError(0, "not an append store (bad magic)");
  }
  if (get_le<std::uint32_t>(bytes, 8) != kAppendVersion) throw CorruptionError(8, "unsupported append store version");
  const auto flags = get_le<std::uint32_t>(bytes, 12);
  if (flags & ~kAppendFlagCow) throw CorruptionError(12, "unknown append store flags");

  AppendScan scan;
  scan.cow = flags & kAppendFlagCow;
  std::size_t at = kAppendHeaderSize;
  while (at < bytes.size()) {
    const std::size_t remaining = bytes.size() - at;
    if (remaining < kFrameHeaderSize) {
      scan.warnings.push_back("torn frame header at offset " + std::to_string(at) + "; truncated");
      break;
    }
    if (crc(bytes.substr(at, kFrameHeaderSize - 4)) != get_le<std::uint32_t>(bytes, at + kFrameHeaderSize - 4)) {
      throw CorruptionError(at, "frame header checksum mismatch");
    }
    Frame f;
    f.offset = at;
    f.seq = get_le<std::uint64_t>(bytes, at);
    const auto op = get_le<std::uint8_t>(bytes, at + 8);
    if (op != static_cast<std::uint8_t>(FrameOp::Put) && op != static_cast<std::uint8_t>(FrameOp::Tombstone)) {
      throw CorruptionError(at, "unknown frame op " + std::to_string(op));
    }
    f.op = static_cast<FrameOp>(op);
    const auto key_len = get_le<std::uint32_t>(bytes, at + 9);
    const auto value_len = get_le<std::uint32_t>(bytes, at + 13);
    f.pad_len = get_le<std::uint32_t>(bytes, at + 17);
    const std::uint64_t total = std::uint64_t{kFrameOverhead} + key_len + value_len + f.pad_len;
    if (total > remaining) {
      scan.warnings.push_back("torn frame at offset " + std::to_string(at) + "; truncated");
      break;
    }
    const std::size_t body = at + kFrameHeaderSize;
    if (crc(bytes.substr(at, total - 4)) != get_le<std::uint32_t>(bytes, at + total - 4)) {
      throw CorruptionError(at, "frame checksum mismatch");
    }
    f.key.assign(bytes.substr(body, key_len));
    f.value.assign(bytes.substr(body + key_len, value_len));
    scan.frames.push_back(std::move(f));
    at += total;
  }
  return scan;
}

AppendStore::AppendStore(bool cow) : cow_(cow) {}

void AppendStore::write(Frame frame) {
  frame.seq = next_seq_++;
  if (cow_) {
    const std::size_t need = frame.size();
    for (auto it = reclaimable_.begin(); it != reclaimable_.end(); ++it) {
      Slot& slot = slots_[*it];
      if (slot.capacity < need) continue;
      frame.pad_len = static_cast<std::uint32_t>(slot.capacity - need);
      frame.offset = slot.frame.offset;
      slot.frame = std::move(frame);
      const std::size_t index = *it;
      reclaimable_.erase(it);
      latest_[slot.frame.key] = index;
      return;
    }
  }
  frame.offset = slots_.empty() ? kAppendHeaderSize : slots_.back().frame.offset + slots_.back().capacity;
  const std::size_t capacity = frame.size();
  latest_[frame.key] = slots_.size();
  slots_.push_back({std::move(frame), capacity});
}

void AppendStore::release(std::optional<std::size_t> slot) {
  if (!cow_ || !slot) return;
  if (pinned_) {
    held_by_reader_.push_back(*slot);
  } else {
    reclaimable_.push_back(*slot);
  }
}

std::optional<std::size_t> AppendStore::latest_slot(const std::string& key) const {
  auto it = latest_.find(key);
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

void AppendStore::put(const std::string& key, const std::string& value) {
  // The new version goes elsewhere; the old slot is only freed afterwards.
  const auto old = latest_slot(key);
  write({0, 0, FrameOp::Put, key, value, 0});
  release(old);
  live_[key] = value;
}

void AppendStore::tombstone(const std::string& key) {
  const auto old = latest_slot(key);
  write({0, 0, FrameOp::Tombstone, key, {}, 0});
  release(old);
  live_.erase(key);
}

void AppendStore::pack() {
  if (pinned_) throw Error("pack while a reader is pinned");
  std::vector<const Slot*> keep;
  for (const auto& [key, value] : live_) keep.push_back(&slots_[latest_.at(key)]);
  std::sort(keep.begin(), keep.end(), [](const Slot* a, const Slot* b) { return a->frame.seq < b->frame.seq; });

  std::vector<Frame> frames;
  for (const Slot* s : keep) frames.push_back({0, 0, FrameOp::Put, s->frame.key, s->frame.value, 0});

  slots_.clear();
  latest_.clear();
  reclaimable_.clear();
  held_by_reader_.clear();
  next_seq_ = 0;
  for (auto& f : frames) write(std::move(f));
}

void AppendStore::open_pin_reader() {
  if (pinned_) throw Error("a reader is already pinned");
  pinned_ = true;
}

void AppendStore::close_pin_reader() {
  if (!pinned_) throw Error("close_pin_reader without open_pin_reader");
  pinned_ = false;
  for (std::size_t i : held_by_reader_) reclaimable_.push_back(i);
  held_by_reader_.clear();
}

std::optional<std::string> AppendStore::get(const std::string& key) const {
  auto it = live_.find(key);
  if (it == live_.end()) return std::nullopt;
  return it->second;
}

std::string AppendStore::bytes() const {
  std::string out = header(cow_);
  for (const auto& s : slots_) out += encode_frame(s.frame);
  return out;
}

std::string pack_append_store(std::string_view bytes) {
  const AppendScan scan = scan_append(bytes);
  const auto last = last_frames(scan.frames);
  std::vector<std::size_t> live;
  for (const auto& [key, i] : last) {
    if (scan.frames[i].op == FrameOp::Put) live.push_back(i);
  }
  std::sort(live.begin(), live.end(), [&](std::size_t a, std::size_t b) { return scan.frames[a].seq < scan.frames[b].seq; });

  std::string out = header(scan.cow);
  std::uint64_t seq = 0;
  for (std::size_t i : live) out += encode_frame({0, seq++, FrameOp::Put, scan.frames[i].key, scan.frames[i].value, 0});
  return out;
}

CarvedSnapshot carve_append(std::string_view bytes, std::vector<std::string>* warnings) {
  AppendScan scan = scan_append(bytes);
  if (warnings) warnings->insert(warnings->end(), scan.warnings.begin(), scan.warnings.end());
  const auto last = last_frames(scan.frames);

  SnapshotBuilder builder;
  for (std::size_t i : seq_order(scan.frames)) {
    const Frame& f = scan.frames[i];
    if (f.op != FrameOp::Put) continue;
    CarvedRecord r;
    r.key = f.key;
    r.value = canon(f.value);
    r.status = last.at(f.key) == i ? Status::Active : Status::Deleted;
    r.version_seq = f.seq;
    builder.add(std::move(r));
  }
  return std::move(builder).finish();
}

}  // namespace logrecon::testbench
