#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "akount/dataio.hpp"
#include "oracle.hpp"

using namespace akount;

TEST_CASE("parse_reads FASTA") {
  std::istringstream in(">r1\nACGT\n");
  CHECK(parse_reads(in) == ReadBatch{"ACGT"});

  std::istringstream folded(">r1\nAC\nGT\n>r2\nTT\n");
  CHECK(parse_reads(folded) == ReadBatch{"ACGT", "TT"});
}

TEST_CASE("parse_reads FASTQ discards headers and quality") {
  std::istringstream in("@r1\nACGT\n+\nFFFF\n");
  CHECK(parse_reads(in) == ReadBatch{"ACGT"});

  std::istringstream two("@a\nACGT\n+\nFFFF\n@b\nTTAA\n+anything\nFFFF\n");
  CHECK(parse_reads(two) == ReadBatch{"ACGT", "TTAA"});
}

TEST_CASE("parse_reads reports malformed FASTQ with line number") {
  std::istringstream in("@r1\nACGT\nFFFF\n");  // '+' line missing
  try {
    parse_reads(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("counting FASTQ equals counting FASTA with the same sequences") {
  std::string genome = generate_genome(2000, 42);
  auto reads = generate_reads(genome, 100, 50, 43);
  std::ostringstream fa, fq;
  for (std::size_t i = 0; i < reads.size(); ++i) {
    fa << ">r" << i << "\n" << reads[i] << "\n";
    fq << "@r" << i << "\n" << reads[i] << "\n+\n" << std::string(100, 'F') << "\n";
  }
  std::istringstream fa_in(fa.str()), fq_in(fq.str());
  CHECK(parse_reads(fa_in) == parse_reads(fq_in));
}

TEST_CASE("generate_genome is deterministic per seed") {
  CHECK(generate_genome(4, 9) == generate_genome(4, 9));
  CHECK(generate_genome(64, 9) != generate_genome(64, 10));
}

TEST_CASE("generate_genome base frequencies are uniform") {
  auto genome = generate_genome(1000000, 77);
  std::array<std::size_t, 4> freq{};
  for (char c : genome) ++freq[encode_base(c)];
  for (auto f : freq) {
    double frac = static_cast<double>(f) / static_cast<double>(genome.size());
    CHECK(frac > 0.245);
    CHECK(frac < 0.255);
  }
}

TEST_CASE("generate_reads samples substrings of the genome") {
  std::string genome = generate_genome(5000, 31);
  auto reads = generate_reads(genome, 120, 100, 32);
  REQUIRE(reads.size() == 100);

  std::set<KmerWord> genome_kmers;
  for_each_kmer(genome, 21, [&](KmerWord km) { genome_kmers.insert(km); });
  for (const auto& read : reads)
    for_each_kmer(read, 21, [&](KmerWord km) { REQUIRE(genome_kmers.count(km) == 1); });
}

TEST_CASE("generate_reads degenerate single start position") {
  std::string genome = generate_genome(150, 8);
  auto reads = generate_reads(genome, 150, 5, 9);
  REQUIRE(reads.size() == 5);
  for (const auto& r : reads) CHECK(r == genome);
}

TEST_CASE("skewed genome edge cases") {
  CHECK(generate_skewed_genome(1000, "AATGG", 0.0, 5) == generate_genome(1000, 5));

  auto all_motif = generate_skewed_genome(200, "A", 1.0, 5);
  auto kmers = kmers_of_read(all_motif, 7);
  std::set<KmerWord> distinct(kmers.begin(), kmers.end());
  CHECK(distinct == std::set<KmerWord>{0});

  CHECK_THROWS_AS(generate_skewed_genome(100, "AN", 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_skewed_genome(100, "AATGG", 1.5, 1), std::invalid_argument);
}

TEST_CASE("skewed genome concentrates kmer mass in the motif family") {
  auto genome = generate_skewed_genome(1 << 17, "AATGG", 0.5, 12);
  auto reads = generate_reads(genome, 150, 5000, 13);
  auto counts = oracle::count_reads(reads, 31);
  std::uint64_t total = 0, top = 0;
  for (const auto& r : counts) {
    total += r.count;
    top = std::max(top, r.count);
  }
  // The dominant motif rotation alone carries >= 40%/5 of all instances;
  // the family of 5 rotations carries ~half.
  CHECK(static_cast<double>(top) / static_cast<double>(total) > 0.08);
  std::vector<std::uint64_t> top5;
  for (const auto& r : counts) top5.push_back(r.count);
  std::sort(top5.rbegin(), top5.rend());
  std::uint64_t family = top5[0] + top5[1] + top5[2] + top5[3] + top5[4];
  CHECK(static_cast<double>(family) / static_cast<double>(total) >= 0.40);
}

TEST_CASE("count file round trip") {
  SplitMix64 rng(55);
  std::vector<CountRecord> records;
  for (int i = 0; i < 500; ++i) records.push_back({rng.next(), 1 + rng.next_below(100)});
  radix_sort(records);

  std::stringstream buf;
  write_counts(buf, records, 31);
  auto back = read_counts(buf);
  CHECK(back.k == 31);
  CHECK(back.records == records);
}

TEST_CASE("count file header-only when empty") {
  std::stringstream buf;
  write_counts(buf, {}, 15);
  CHECK(buf.str().size() == 4 + 4 + 4 + 8);
  auto back = read_counts(buf);
  CHECK(back.k == 15);
  CHECK(back.records.empty());
}

TEST_CASE("count file rejects bad magic") {
  std::stringstream buf;
  buf << "NOPE";
  CHECK_THROWS_AS(read_counts(buf), CountFileError);
}

TEST_CASE("text rendering") {
  std::ostringstream out;
  std::vector<CountRecord> records{{27, 2}};
  write_counts_text(out, records, 4);
  CHECK(out.str() == "ACGT\t2\n");
}
