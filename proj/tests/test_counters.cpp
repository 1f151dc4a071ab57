#include <catch2/catch_amalgamated.hpp>

#include "akount/counters.hpp"
#include "akount/dataio.hpp"
#include "oracle.hpp"

using namespace akount;

namespace {
ReadBatch sample_dataset(std::size_t genome_len, std::size_t read_len, std::size_t n_reads,
                         std::uint64_t seed) {
  auto genome = generate_genome(genome_len, seed);
  return generate_reads(genome, read_len, n_reads, seed + 1);
}
}  // namespace

TEST_CASE("count_serial hand examples") {
  CHECK(count_serial({"ACGTA"}, 4) == std::vector<CountRecord>{{27, 1}, {108, 1}});
  CHECK(count_serial({"AAAA", "AAAA"}, 4) == std::vector<CountRecord>{{0, 2}});
  CHECK(count_serial({}, 4).empty());
}

TEST_CASE("count_serial equals hash-map oracle") {
  auto reads = sample_dataset(10000, 80, 300, 17);
  reads[5][10] = 'N';  // ambiguity handled identically
  reads[7][0] = 'n';
  CHECK(count_serial(reads, 15) == oracle::count_reads(reads, 15));
}

TEST_CASE("count_bsp equals count_serial across P and b") {
  auto reads = sample_dataset(8000, 100, 400, 29);
  auto expected = count_serial(reads, 15);
  for (int P : {1, 2, 4, 8}) {
    for (std::uint64_t b : {std::uint64_t{10}, std::uint64_t{1000}}) {
      Engine engine(P, TopologyKind::OneD, 4096, [](int, const PacketView&) {});
      auto result = count_bsp(reads, 15, b, engine);
      REQUIRE(result.records == expected);
      CHECK(result.report.total_kmers == 400 * (100 - 15 + 1));
    }
  }
}

TEST_CASE("count_bsp round accounting") {
  // n=1000, m=150, k=31, P=4: each PE generates 30000 kmers; with b=10^4
  // that is 3 capacity flushes plus the final flush = 4 collective rounds.
  auto reads = sample_dataset(1 << 18, 150, 1000, 41);
  Engine engine(4, TopologyKind::OneD, 4096, [](int, const PacketView&) {});
  auto result = count_bsp(reads, 31, 10000, engine);
  CHECK(result.report.metrics.collective_rounds == 4);

  // b larger than everything degenerates to a single final round.
  Engine engine1(1, TopologyKind::OneD, 4096, [](int, const PacketView&) {});
  auto single = count_bsp(reads, 31, std::numeric_limits<std::uint64_t>::max(), engine1);
  CHECK(single.report.metrics.collective_rounds == 1);
  CHECK(single.records == count_serial(reads, 31));
}

TEST_CASE("count_fabsp equals count_serial across topologies and P") {
  auto reads = sample_dataset(6000, 90, 300, 53);
  auto expected = count_serial(reads, 15);
  for (auto topo : {TopologyKind::OneD, TopologyKind::TwoD, TopologyKind::ThreeD}) {
    for (int P : {1, 2, 4, 9, 16}) {
      AggregationConfig cfg;
      cfg.c3 = 500;
      for (bool l3 : {false, true}) {
        cfg.l3_enabled = l3;
        auto result = count_fabsp(reads, 15, P, topo, cfg, 256);
        REQUIRE(result.records == expected);
        CHECK(result.report.metrics.barriers == 3);
      }
    }
  }
}

TEST_CASE("count_fabsp parallel mode matches deterministic mode") {
  auto reads = sample_dataset(6000, 90, 500, 61);
  AggregationConfig cfg;
  auto det = count_fabsp(reads, 21, 8, TopologyKind::TwoD, cfg, 512, false);
  auto par = count_fabsp(reads, 21, 8, TopologyKind::TwoD, cfg, 512, true);
  CHECK(det.records == par.records);
  CHECK(det.report.digest == par.report.digest);
  CHECK(par.report.metrics.barriers == 3);
}

TEST_CASE("digest equality tracks record-set equality") {
  auto reads = sample_dataset(4000, 70, 200, 71);
  AggregationConfig cfg;
  auto a = count_fabsp(reads, 15, 4, TopologyKind::OneD, cfg);
  auto b = count_fabsp(reads, 15, 9, TopologyKind::ThreeD, cfg);
  CHECK(a.report.digest == b.report.digest);
  auto other = count_fabsp(reads, 11, 4, TopologyKind::OneD, cfg);
  CHECK(a.report.digest != other.report.digest);
}

TEST_CASE("uniform data balances received items across PEs") {
  auto reads = sample_dataset(1 << 17, 150, 4000, 83);
  AggregationConfig cfg;
  auto result = count_fabsp(reads, 31, 16, TopologyKind::OneD, cfg);
  const auto& received = result.report.metrics.per_pe_received;
  std::uint64_t max = 0, sum = 0;
  for (auto r : received) {
    max = std::max(max, r);
    sum += r;
  }
  double mean = static_cast<double>(sum) / static_cast<double>(received.size());
  CHECK(static_cast<double>(max) / mean <= 1.1);
}

TEST_CASE("heavy-hitter dataset: L3 cuts payload without changing counts") {
  auto genome = generate_skewed_genome(1 << 16, "AATGG", 0.5, 97);
  auto reads = generate_reads(genome, 150, 3000, 98);
  AggregationConfig on, off;
  on.l3_enabled = true;
  auto with_l3 = count_fabsp(reads, 31, 4, TopologyKind::OneD, on);
  auto without = count_fabsp(reads, 31, 4, TopologyKind::OneD, off);
  CHECK(with_l3.records == without.records);
  CHECK(with_l3.report.metrics.payload_bytes < without.report.metrics.payload_bytes);
}
