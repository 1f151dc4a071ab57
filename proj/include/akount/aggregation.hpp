#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "akount/kmer.hpp"
#include "akount/packet.hpp"
#include "akount/runtime.hpp"

// Application-level aggregation layers on top of the L0 conveyor:
//   L3  pre-sort/accumulate buffer that splits heavy hitters (count > 2)
//       into (kmer, count) pairs before they hit the wire,
//   L2  per-destination packetization into HEAVY / NORMAL packets,
//   L1  per-destination packet staging handed to L0 in bulk.
// The receive side unpacks packets into the owner PE's pair table.

namespace akount {

struct AggregationConfig {
  std::size_t c1 = 1024;   // words per L1 handoff
  std::size_t c2 = 32;     // words per NORMAL packet; HEAVY holds c2/2 pairs
  std::size_t c3 = 10000;  // L3 buffer length
  bool l2_enabled = true;
  bool l3_enabled = false;

  void validate() const {
    if (c2 < 2 || c2 % 2 != 0) throw std::invalid_argument("C2 must be even and >= 2");
    if (c2 > kMaxPacketElems) throw std::invalid_argument("C2 exceeds packet element capacity");
    if (c3 < c2) throw std::invalid_argument("C3 must be >= C2");
    if (c1 < 1) throw std::invalid_argument("C1 must be >= 1");
  }
};

/// Send-side aggregation state of one PE. Owned by that PE's execution
/// context; never shared.
class Aggregator {
 public:
  Aggregator(int pe, Engine& engine, const AggregationConfig& cfg)
      : pe_(pe),
        pe_count_(static_cast<std::uint32_t>(engine.pe_count())),
        engine_(engine),
        cfg_(cfg),
        l2_heavy_(static_cast<std::size_t>(engine.pe_count())),
        l2_normal_(static_cast<std::size_t>(engine.pe_count())),
        l1_(static_cast<std::size_t>(engine.pe_count())) {
    cfg.validate();
    if (cfg_.l3_enabled) l3_.reserve(cfg_.c3);
  }

  /// One-sided add: the k-mer contributes its multiplicity to its owner
  /// PE's pair table by the next global barrier.
  void async_add(KmerWord kmer) {
    if (cfg_.l3_enabled)
      add_to_l3(kmer);
    else
      add_to_l2(kmer, 1);
  }

  void add_to_l3(KmerWord kmer) {
    l3_.push_back(kmer);
    if (l3_.size() == cfg_.c3) flush_l3();
  }

  void add_to_l2(KmerWord kmer, std::uint64_t count) {
    const int dest = static_cast<int>(owner_pe(kmer, pe_count_));
    if (!cfg_.l2_enabled) {
      // One word per packet; heavy hitters still travel as one pair.
      if (count > 2) {
        const std::array<std::uint64_t, 2> pair{kmer, count};
        add_to_l1(dest, PacketType::Heavy, pair.data(), 2);
      } else {
        for (std::uint64_t i = 0; i < count; ++i)
          add_to_l1(dest, PacketType::Normal, &kmer, 1);
      }
      return;
    }
    if (count > 2) {
      auto& buf = l2_heavy_[static_cast<std::size_t>(dest)];
      buf.push_back({kmer, count});
      if (buf.size() == cfg_.c2 / 2) flush_l2_heavy(dest);
    } else {
      auto& buf = l2_normal_[static_cast<std::size_t>(dest)];
      buf.push_back(kmer);
      if (buf.size() == cfg_.c2) flush_l2_normal(dest);
      if (count == 2) {
        buf.push_back(kmer);
        if (buf.size() == cfg_.c2) flush_l2_normal(dest);
      }
    }
  }

  /// End-of-input flush: L3 residue is sorted/accumulated and forwarded,
  /// then every partial L2 and L1 buffer is pushed out. Call once per PE
  /// after its last async_add, before the global barrier.
  void drain() {
    if (cfg_.l3_enabled && !l3_.empty()) flush_l3();
    for (int dest = 0; dest < static_cast<int>(pe_count_); ++dest) {
      if (!l2_heavy_[static_cast<std::size_t>(dest)].empty()) flush_l2_heavy(dest);
      if (!l2_normal_[static_cast<std::size_t>(dest)].empty()) flush_l2_normal(dest);
    }
    for (int dest = 0; dest < static_cast<int>(pe_count_); ++dest) flush_l1(dest);
  }

 private:
  struct L1Staging {
    struct Entry {
      PacketType type;
      std::vector<std::uint64_t> body;
    };
    std::vector<Entry> packets;
    std::size_t words = 0;
  };

  void flush_l3() {
    radix_sort(l3_);
    for (const auto& rec : accumulate(l3_)) add_to_l2(rec.kmer, rec.count);
    l3_.clear();
  }

  void flush_l2_heavy(int dest) {
    auto& buf = l2_heavy_[static_cast<std::size_t>(dest)];
    std::vector<std::uint64_t> body;
    body.reserve(buf.size() * 2);
    for (const auto& [kmer, count] : buf) {
      body.push_back(kmer);
      body.push_back(count);
    }
    add_to_l1(dest, PacketType::Heavy, body.data(), body.size());
    buf.clear();
  }

  void flush_l2_normal(int dest) {
    auto& buf = l2_normal_[static_cast<std::size_t>(dest)];
    add_to_l1(dest, PacketType::Normal, buf.data(), buf.size());
    buf.clear();
  }

  void add_to_l1(int dest, PacketType type, const std::uint64_t* words, std::size_t n) {
    auto& staging = l1_[static_cast<std::size_t>(dest)];
    staging.packets.push_back({type, std::vector<std::uint64_t>(words, words + n)});
    staging.words += n;
    if (staging.words >= cfg_.c1) flush_l1(dest);
  }

  void flush_l1(int dest) {
    auto& staging = l1_[static_cast<std::size_t>(dest)];
    // Packet boundaries are preserved across the handoff.
    for (auto& pkt : staging.packets)
      engine_.inject(pe_, dest, pkt.type, pkt.body);
    staging.packets.clear();
    staging.words = 0;
  }

  int pe_;
  std::uint32_t pe_count_;
  Engine& engine_;
  AggregationConfig cfg_;
  std::vector<KmerWord> l3_;
  std::vector<std::vector<std::pair<KmerWord, std::uint64_t>>> l2_heavy_;
  std::vector<std::vector<KmerWord>> l2_normal_;
  std::vector<L1Staging> l1_;
};

/// Validating decode of a wire packet: the header's element count must
/// match the body exactly.
inline PacketView decode_packet(std::uint32_t header, std::span<const std::uint64_t> body) {
  const PacketHeader hdr = decode_header(header);
  if (hdr.elems != body.size())
    throw PacketFormatError("packet element count does not match body");
  return PacketView{static_cast<int>(hdr.dest), hdr.type, body};
}

/// Receive-side unpacking into the owner PE's pair table. HEAVY bodies
/// append (kmer, count) pairs; NORMAL words append as (kmer, 1).
inline void process_receive_buffer(std::vector<CountRecord>& table, const PacketView& pkt) {
  if (pkt.type == PacketType::Heavy) {
    if (pkt.words.size() % 2 != 0)
      throw PacketFormatError("HEAVY packet with odd word count");
    for (std::size_t i = 0; i < pkt.words.size(); i += 2)
      table.push_back({pkt.words[i], pkt.words[i + 1]});
  } else {
    for (std::uint64_t w : pkt.words) table.push_back({w, 1});
  }
}

}  // namespace akount
