#pragma once

#include <cstdint>
#include <stdexcept>

// Aggregated-message wire format. Every packet carries a 32-bit header:
//   bits  0..23  final destination PE
//   bit   24     type (0 = NORMAL, 1 = HEAVY)
//   bits 25..31  element count in 64-bit body words
// NORMAL bodies are plain k-mer words, one instance each; HEAVY bodies are
// (kmer, count) word pairs.

namespace akount {

enum class PacketType : std::uint8_t { Normal = 0, Heavy = 1 };

inline constexpr std::uint32_t kMaxPacketDest = (1u << 24) - 1;
inline constexpr std::uint32_t kMaxPacketElems = (1u << 7) - 1;
inline constexpr std::uint32_t kHeaderBytes = 4;

struct PacketHeader {
  std::uint32_t dest;
  PacketType type;
  std::uint32_t elems;

  friend bool operator==(const PacketHeader&, const PacketHeader&) = default;
};

class PacketFormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr std::uint32_t encode_header(std::uint32_t dest, PacketType type, std::uint32_t elems) {
  return dest | (static_cast<std::uint32_t>(type) << 24) | (elems << 25);
}

constexpr PacketHeader decode_header(std::uint32_t header) {
  return {header & kMaxPacketDest,
          static_cast<PacketType>((header >> 24) & 1u),
          header >> 25};
}

}  // namespace akount
