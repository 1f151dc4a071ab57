#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "akount/aggregation.hpp"
#include "akount/dataio.hpp"
#include "akount/kmer.hpp"
#include "akount/runtime.hpp"

// The three end-to-end counting algorithms. All three produce the same
// sorted, deduplicated record array for a given input.

namespace akount {

struct RunReport {
  std::string algorithm;
  std::uint64_t reads = 0;
  std::uint64_t total_kmers = 0;
  int k = 0;
  int pe_count = 1;
  std::uint64_t batch = 0;  // BSP only
  TopologyKind topology = TopologyKind::OneD;
  AggregationConfig agg;
  double wall_seconds = 0.0;
  EngineMetrics metrics;
  std::uint64_t digest = 0;
};

struct CountResult {
  std::vector<CountRecord> records;
  RunReport report;
};

/// FNV-1a over the little-endian byte image of the sorted records.
inline std::uint64_t count_digest(const std::vector<CountRecord>& records) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto mix_word = [&h](std::uint64_t w) {
    for (int i = 0; i < 8; ++i) {
      h ^= (w >> (8 * i)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto& r : records) {
    mix_word(r.kmer);
    mix_word(r.count);
  }
  return h;
}

/// Contiguous block partition: PE p gets reads [p*n/P, (p+1)*n/P).
inline std::pair<std::size_t, std::size_t> read_range(std::size_t n_reads, int pe_count, int pe) {
  const auto p = static_cast<std::size_t>(pe);
  const auto P = static_cast<std::size_t>(pe_count);
  return {n_reads * p / P, n_reads * (p + 1) / P};
}

inline std::vector<CountRecord> count_serial(const ReadBatch& reads, int k) {
  std::vector<KmerWord> kmers;
  for (const auto& read : reads)
    for_each_kmer(read, k, [&](KmerWord km) { kmers.push_back(km); });
  radix_sort(kmers);
  return accumulate(kmers);
}

namespace detail {
inline std::vector<CountRecord> merge_pe_outputs(std::vector<std::vector<CountRecord>>&& per_pe) {
  std::vector<CountRecord> all;
  for (auto& part : per_pe) {
    all.insert(all.end(), part.begin(), part.end());
    part.clear();
  }
  radix_sort(all);  // owner partition makes the per-PE kmer sets disjoint
  return all;
}
}  // namespace detail

/// BSP baseline: per-destination buffering, batch flushes every b
/// generated k-mers, and one simulated synchronous many-to-many exchange
/// per flush. Collective rounds come out as floor(G_max / b) + 1 where
/// G_max is the largest per-PE k-mer count (capacity flushes plus the
/// unconditional final flush).
inline CountResult count_bsp(const ReadBatch& reads, int k, std::uint64_t batch, Engine& engine) {
  const int P = engine.pe_count();
  const auto t0 = std::chrono::steady_clock::now();

  // Phase 1 generation, per PE.
  std::vector<std::vector<KmerWord>> generated(static_cast<std::size_t>(P));
  for (int pe = 0; pe < P; ++pe) {
    auto [lo, hi] = read_range(reads.size(), P, pe);
    for (std::size_t i = lo; i < hi; ++i)
      for_each_kmer(reads[i], k, [&](KmerWord km) {
        generated[static_cast<std::size_t>(pe)].push_back(km);
      });
  }
  std::uint64_t g_max = 0;
  std::uint64_t total = 0;
  for (const auto& g : generated) {
    g_max = std::max(g_max, static_cast<std::uint64_t>(g.size()));
    total += g.size();
  }

  std::vector<std::vector<CountRecord>> tables(static_cast<std::size_t>(P));
  const std::uint64_t rounds = g_max / batch + 1;
  for (std::uint64_t round = 0; round < rounds; ++round) {
    std::vector<std::vector<std::vector<CountRecord>>> send(
        static_cast<std::size_t>(P),
        std::vector<std::vector<CountRecord>>(static_cast<std::size_t>(P)));
    for (int pe = 0; pe < P; ++pe) {
      const auto& g = generated[static_cast<std::size_t>(pe)];
      const std::size_t lo = static_cast<std::size_t>(std::min<std::uint64_t>(round * batch, g.size()));
      const std::size_t hi = static_cast<std::size_t>(std::min<std::uint64_t>((round + 1) * batch, g.size()));
      std::vector<std::vector<KmerWord>> buckets(static_cast<std::size_t>(P));
      for (std::size_t i = lo; i < hi; ++i)
        buckets[owner_pe(g[i], static_cast<std::uint32_t>(P))].push_back(g[i]);
      for (int dst = 0; dst < P; ++dst) {
        auto& bucket = buckets[static_cast<std::size_t>(dst)];
        radix_sort(bucket);
        send[static_cast<std::size_t>(pe)][static_cast<std::size_t>(dst)] = accumulate(bucket);
      }
    }
    engine.collective_exchange(send, tables);
  }

  // Phase 2: per-PE sort + merge of the received pairs.
  std::vector<std::vector<CountRecord>> outputs(static_cast<std::size_t>(P));
  for (int pe = 0; pe < P; ++pe) {
    auto& table = tables[static_cast<std::size_t>(pe)];
    radix_sort(table);
    outputs[static_cast<std::size_t>(pe)] = accumulate_pairs(table);
  }

  CountResult result;
  result.records = detail::merge_pe_outputs(std::move(outputs));
  result.report.algorithm = "bsp";
  result.report.reads = reads.size();
  result.report.total_kmers = total;
  result.report.k = k;
  result.report.pe_count = P;
  result.report.batch = batch;
  result.report.topology = engine.topology().kind;
  result.report.metrics = engine.metrics_snapshot();
  result.report.digest = count_digest(result.records);
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

/// FA-BSP: fine-grained asynchronous adds through the aggregation layers,
/// exactly three global barriers (start, end of phase 1, completion).
inline CountResult count_fabsp(const ReadBatch& reads, int k, int pe_count,
                               TopologyKind topology, const AggregationConfig& agg,
                               std::size_t c0 = 4096, bool parallel = false) {
  agg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::vector<CountRecord>> tables(static_cast<std::size_t>(pe_count));
  Engine engine(pe_count, topology, c0, [&tables](int pe, const PacketView& pkt) {
    process_receive_buffer(tables[static_cast<std::size_t>(pe)], pkt);
  });

  engine.global_barrier();  // 1: everyone holds its read partition

  auto phase1 = [&](int pe) {
    Aggregator agg_state(pe, engine, agg);
    auto [lo, hi] = read_range(reads.size(), pe_count, pe);
    for (std::size_t i = lo; i < hi; ++i)
      for_each_kmer(reads[i], k, [&](KmerWord km) { agg_state.async_add(km); });
    agg_state.drain();
  };
  if (parallel) {
    engine.run_parallel(phase1);
  } else {
    for (int pe = 0; pe < pe_count; ++pe) phase1(pe);
  }

  engine.global_barrier();  // 2: all asynchronous adds delivered

  std::vector<std::vector<CountRecord>> outputs(static_cast<std::size_t>(pe_count));
  auto phase2 = [&](int pe) {
    auto& table = tables[static_cast<std::size_t>(pe)];
    radix_sort(table);
    outputs[static_cast<std::size_t>(pe)] = accumulate_pairs(table);
  };
  if (parallel) {
    engine.run_parallel(phase2);
  } else {
    for (int pe = 0; pe < pe_count; ++pe) phase2(pe);
  }

  engine.global_barrier();  // 3: completion, metrics stable

  CountResult result;
  result.records = detail::merge_pe_outputs(std::move(outputs));
  std::uint64_t total = 0;
  for (const auto& r : result.records) total += r.count;
  result.report.algorithm = "fabsp";
  result.report.reads = reads.size();
  result.report.total_kmers = total;
  result.report.k = k;
  result.report.pe_count = pe_count;
  result.report.topology = topology;
  result.report.agg = agg;
  result.report.metrics = engine.metrics_snapshot();
  result.report.digest = count_digest(result.records);
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace akount
