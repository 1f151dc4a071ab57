#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// DNA encoding, rolling k-mer extraction, ownership hashing, radix sorting
// and accumulation. All functions are pure or operate on caller-owned
// buffers; no shared mutable state.

namespace akount {

/// A k-mer packed 2 bits per base into the low 2k bits of a 64-bit word.
using KmerWord = std::uint64_t;

inline constexpr int kMaxK = 31;

struct CountRecord {
  KmerWord kmer;
  std::uint64_t count;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// Sentinel for bases outside {A,C,G,T} (either case). Not an error: it
/// resets the rolling window.
inline constexpr std::uint8_t kAmbiguousBase = 4;

namespace detail {
constexpr std::array<std::uint8_t, 256> make_base_table() {
  std::array<std::uint8_t, 256> t{};
  for (auto& e : t) e = kAmbiguousBase;
  t['A'] = t['a'] = 0;
  t['C'] = t['c'] = 1;
  t['G'] = t['g'] = 2;
  t['T'] = t['t'] = 3;
  return t;
}
inline constexpr std::array<std::uint8_t, 256> kBaseTable = make_base_table();
}  // namespace detail

/// A=0, C=1, G=2, T=3 (case-insensitive); kAmbiguousBase otherwise.
constexpr std::uint8_t encode_base(char c) {
  return detail::kBaseTable[static_cast<unsigned char>(c)];
}

constexpr KmerWord kmer_mask(int k) {
  assert(k >= 1 && k <= kMaxK);
  return (KmerWord{1} << (2 * k)) - 1;
}

/// Big-endian base packing: the first base occupies the highest occupied
/// bit pair. k is taken from prefix.size().
inline std::optional<KmerWord> first_kmer(std::string_view prefix) {
  assert(prefix.size() >= 1 && prefix.size() <= static_cast<std::size_t>(kMaxK));
  KmerWord kmer = 0;
  for (char c : prefix) {
    std::uint8_t code = encode_base(c);
    if (code == kAmbiguousBase) return std::nullopt;
    kmer = (kmer << 2) | code;
  }
  return kmer;
}

/// Shift in one base on the right and truncate to 2k bits.
inline std::optional<KmerWord> next_kmer(KmerWord prev, char c, int k) {
  assert((prev >> (2 * k)) == 0);
  std::uint8_t code = encode_base(c);
  if (code == kAmbiguousBase) return std::nullopt;
  return ((prev << 2) | code) & kmer_mask(k);
}

/// Invokes fn(kmer) for every valid window of the read, left to right.
/// Any ambiguous base invalidates every window containing it; the rolling
/// window restarts after it. Reads shorter than k yield nothing.
template <class Fn>
inline void for_each_kmer(std::string_view read, int k, Fn&& fn) {
  const KmerWord mask = kmer_mask(k);
  KmerWord kmer = 0;
  int filled = 0;
  for (char c : read) {
    std::uint8_t code = encode_base(c);
    if (code == kAmbiguousBase) {
      filled = 0;
      kmer = 0;
      continue;
    }
    kmer = ((kmer << 2) | code) & mask;
    if (filled < k) ++filled;
    if (filled == k) fn(kmer);
  }
}

inline std::vector<KmerWord> kmers_of_read(std::string_view read, int k) {
  std::vector<KmerWord> out;
  if (read.size() >= static_cast<std::size_t>(k))
    out.reserve(read.size() - k + 1);
  for_each_kmer(read, k, [&](KmerWord km) { out.push_back(km); });
  return out;
}

/// Decode back to an ACGT string (inverse of first_kmer for unambiguous
/// input).
inline std::string decode_kmer(KmerWord kmer, int k) {
  static constexpr char kBases[] = "ACGT";
  std::string s(static_cast<std::size_t>(k), '?');
  for (int i = 0; i < k; ++i)
    s[static_cast<std::size_t>(i)] = kBases[(kmer >> (2 * (k - 1 - i))) & 3];
  return s;
}

/// 64-bit finalizer-style mixer. mix64(0) == 0.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Owner PE of a k-mer: deterministic, uniform over [0, P).
constexpr std::uint32_t owner_pe(KmerWord kmer, std::uint32_t pe_count) {
  assert(pe_count >= 1);
  return static_cast<std::uint32_t>(mix64(kmer) % pe_count);
}

/// LSB-first radix sort over 8-bit digits of key(item), 8 passes worst
/// case; passes whose histogram collapses to a single bucket are skipped.
template <class T, class KeyFn>
inline void radix_sort_by(std::vector<T>& items, KeyFn key) {
  if (items.size() < 2) return;
  std::vector<T> scratch(items.size());
  T* src = items.data();
  T* dst = scratch.data();
  bool swapped = false;
  for (int pass = 0; pass < 8; ++pass) {
    const int shift = pass * 8;
    std::array<std::size_t, 257> offsets{};
    for (std::size_t i = 0; i < items.size(); ++i)
      ++offsets[((key(src[i]) >> shift) & 0xFF) + 1];

    bool single_bucket = false;
    for (int d = 0; d < 256; ++d) {
      if (offsets[static_cast<std::size_t>(d) + 1] == items.size()) {
        single_bucket = true;
        break;
      }
    }
    if (single_bucket) continue;

    for (int d = 0; d < 256; ++d) offsets[static_cast<std::size_t>(d) + 1] += offsets[static_cast<std::size_t>(d)];
    for (std::size_t i = 0; i < items.size(); ++i)
      dst[offsets[(key(src[i]) >> shift) & 0xFF]++] = src[i];
    std::swap(src, dst);
    swapped = !swapped;
  }
  if (swapped) items.swap(scratch);
}

inline void radix_sort(std::vector<std::uint64_t>& items) {
  radix_sort_by(items, [](std::uint64_t x) { return x; });
}

/// Sort records ascending by kmer; count order among equal kmers is
/// stable.
inline void radix_sort(std::vector<CountRecord>& items) {
  radix_sort_by(items, [](const CountRecord& r) { return r.kmer; });
}

/// Sweep a sorted k-mer array into (kmer, count) records.
inline std::vector<CountRecord> accumulate(const std::vector<KmerWord>& sorted_kmers) {
  std::vector<CountRecord> out;
  for (std::size_t i = 0; i < sorted_kmers.size(); ++i) {
    assert(i == 0 || sorted_kmers[i - 1] <= sorted_kmers[i]);
    if (!out.empty() && out.back().kmer == sorted_kmers[i])
      ++out.back().count;
    else
      out.push_back({sorted_kmers[i], 1});
  }
  return out;
}

/// Merge records sorted by kmer, summing counts of duplicates.
inline std::vector<CountRecord> accumulate_pairs(const std::vector<CountRecord>& sorted_records) {
  std::vector<CountRecord> out;
  for (std::size_t i = 0; i < sorted_records.size(); ++i) {
    assert(i == 0 || sorted_records[i - 1].kmer <= sorted_records[i].kmer);
    if (!out.empty() && out.back().kmer == sorted_records[i].kmer)
      out.back().count += sorted_records[i].count;
    else
      out.push_back(sorted_records[i]);
  }
  return out;
}

}  // namespace akount
