#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "akount/kmer.hpp"

// FASTA/FASTQ ingestion, reproducible synthetic dataset generation, and
// count-file persistence.

namespace akount {

using ReadBatch = std::vector<std::string>;

enum class ReadFormat { Auto, Fasta, Fastq };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parse FASTA ('>' headers, sequences may span lines) or FASTQ (strict
/// 4-line records). Quality lines and headers are discarded. Auto-detects
/// by the first byte.
inline ReadBatch parse_reads(std::istream& in, ReadFormat format = ReadFormat::Auto) {
  ReadBatch reads;
  std::string line;
  std::size_t lineno = 0;

  if (format == ReadFormat::Auto) {
    int c = in.peek();
    if (c == std::char_traits<char>::eof()) return reads;
    format = (c == '@') ? ReadFormat::Fastq : ReadFormat::Fasta;
  }

  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) return false;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    ++lineno;
    return true;
  };

  if (format == ReadFormat::Fasta) {
    bool in_record = false;
    while (next_line(line)) {
      if (line.empty()) continue;
      if (line[0] == '>') {
        reads.emplace_back();
        in_record = true;
      } else {
        if (!in_record) throw ParseError("sequence data before FASTA header", lineno);
        reads.back() += line;
      }
    }
  } else {
    while (next_line(line)) {
      if (line.empty()) continue;
      if (line[0] != '@') throw ParseError("expected FASTQ '@' header", lineno);
      std::string seq, plus, qual;
      if (!next_line(seq)) throw ParseError("missing FASTQ sequence line", lineno + 1);
      if (!next_line(plus) || plus.empty() || plus[0] != '+')
        throw ParseError("missing FASTQ '+' line", lineno + (plus.empty() ? 1 : 0));
      if (!next_line(qual)) throw ParseError("missing FASTQ quality line", lineno + 1);
      if (qual.size() != seq.size())
        throw ParseError("FASTQ quality length mismatch", lineno);
      reads.push_back(std::move(seq));
    }
  }
  return reads;
}

/// Pinned counter-based PRNG (splitmix64): all generators are pure
/// functions of (parameters, seed) across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  /// Unbiased-enough bounded draw via 128-bit multiply-shift.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// i.i.d. uniform bases over {A,C,G,T}.
inline std::string generate_genome(std::size_t length, std::uint64_t seed) {
  static constexpr char kBases[] = "ACGT";
  SplitMix64 rng(seed);
  std::string genome(length, 'A');
  for (auto& c : genome) c = kBases[rng.next() >> 62];
  return genome;
}

/// Genome whose leading round(rho * length) bases tile the motif; the
/// rest is uniform random. rho=0 reproduces generate_genome exactly.
inline std::string generate_skewed_genome(std::size_t length, std::string_view motif,
                                          double rho, std::uint64_t seed) {
  if (motif.empty()) throw std::invalid_argument("empty skew motif");
  for (char c : motif)
    if (encode_base(c) == kAmbiguousBase) throw std::invalid_argument("ambiguous base in skew motif");
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("skew fraction outside [0,1]");

  static constexpr char kBases[] = "ACGT";
  const auto repeat_len = static_cast<std::size_t>(rho * static_cast<double>(length) + 0.5);
  SplitMix64 rng(seed);
  std::string genome(length, 'A');
  for (std::size_t i = 0; i < length; ++i)
    genome[i] = (i < repeat_len) ? motif[i % motif.size()] : kBases[rng.next() >> 62];
  return genome;
}

/// Error-free reads at uniformly random start positions.
inline ReadBatch generate_reads(std::string_view genome, std::size_t read_len,
                                std::size_t n_reads, std::uint64_t seed) {
  if (read_len > genome.size()) throw std::invalid_argument("read length exceeds genome length");
  SplitMix64 rng(seed);
  ReadBatch reads;
  reads.reserve(n_reads);
  const std::uint64_t positions = genome.size() - read_len + 1;
  for (std::size_t i = 0; i < n_reads; ++i) {
    auto start = rng.next_below(positions);
    reads.emplace_back(genome.substr(start, read_len));
  }
  return reads;
}

// ---------------------------------------------------------------------
// Count files: magic "AKCT", u32 version=1, u32 k, u64 record count,
// then (u64 kmer, u64 count) pairs, all little-endian.

inline constexpr char kCountFileMagic[4] = {'A', 'K', 'C', 'T'};
inline constexpr std::uint32_t kCountFileVersion = 1;

class CountFileError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
template <class T>
void put_le(std::ostream& out, T value) {
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(buf, sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  if (!in) throw CountFileError("truncated count file");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(static_cast<unsigned char>(buf[i])) << (8 * i);
  return value;
}
}  // namespace detail

struct CountData {
  std::uint32_t k;
  std::vector<CountRecord> records;
};

inline void write_counts(std::ostream& out, std::span<const CountRecord> records,
                         std::uint32_t k) {
  out.write(kCountFileMagic, 4);
  detail::put_le(out, kCountFileVersion);
  detail::put_le(out, k);
  detail::put_le(out, static_cast<std::uint64_t>(records.size()));
  for (const auto& r : records) {
    detail::put_le(out, r.kmer);
    detail::put_le(out, r.count);
  }
}

inline CountData read_counts(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCountFileMagic, 4) != 0)
    throw CountFileError("bad count file magic");
  auto version = detail::get_le<std::uint32_t>(in);
  if (version != kCountFileVersion)
    throw CountFileError("unsupported count file version " + std::to_string(version));
  CountData data;
  data.k = detail::get_le<std::uint32_t>(in);
  auto n = detail::get_le<std::uint64_t>(in);
  data.records.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    CountRecord r;
    r.kmer = detail::get_le<std::uint64_t>(in);
    r.count = detail::get_le<std::uint64_t>(in);
    data.records.push_back(r);
  }
  return data;
}

/// Interoperable text rendering: one "<ACGT-string>\t<count>\n" per record.
inline void write_counts_text(std::ostream& out, std::span<const CountRecord> records, int k) {
  for (const auto& r : records)
    out << decode_kmer(r.kmer, k) << '\t' << r.count << '\n';
}

}  // namespace akount
