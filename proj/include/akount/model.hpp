#pragma once

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

// Two-phase analytical cost model: k-mer generation/reshuffling (compute,
// intranode memory traffic, internode NIC traffic) followed by sorting
// and accumulation (compute, intranode traffic). Time shares use
// no-overlap accounting; phase totals take the max within each phase.
// All functions are pure.

namespace akount {

struct MachineParams {
  double c_node = 121.9e9;    // peak INT64 ops/s per node
  double beta_mem = 46.9e9;   // memory bandwidth per node, bytes/s
  double cache_bytes = 38e6;  // fast-memory size Z (carried, unused below)
  double line_bytes = 64;     // cache-line size L
  double beta_link = 12.5e9;  // combined bidirectional NIC bandwidth, bytes/s

  void validate() const {
    if (c_node <= 0 || beta_mem <= 0 || cache_bytes <= 0 || line_bytes <= 0 || beta_link <= 0)
      throw std::invalid_argument("machine parameters must be strictly positive");
  }
};

struct WorkloadParams {
  double reads = 0;           // n
  double bases_per_read = 0;  // m
  int k = 31;
  int nodes = 1;             // P
  double word_bits = 64;     // k-mer storage width W

  double total_kmers() const { return reads * (bases_per_read - k + 1); }

  void validate() const {
    if (reads <= 0 || bases_per_read <= 0 || nodes < 1) throw std::invalid_argument("invalid workload");
    if (k < 1 || static_cast<double>(k) > bases_per_read) throw std::invalid_argument("k out of range");
  }
};

enum class CommMode { Sum, Max };

struct Phase1Costs {
  double comp;
  double intra;
  double inter;
};

struct Phase2Costs {
  double comp;
  double intra;
};

struct CacheMisses {
  double phase1;
  double phase2;
};

struct CostBreakdown {
  double t_comp1, t_intra1, t_inter1;
  double t_comp2, t_intra2;
  double t_comm1;
  double t1, t2, total;
  double share_compute, share_intra, share_inter;
};

/// Predicted last-level cache misses per node: input parse + k-mer store
/// in phase 1, worst-case W/8 radix passes in phase 2.
inline CacheMisses predicted_cache_misses(const WorkloadParams& w, const MachineParams& m) {
  w.validate();
  m.validate();
  const double N = w.total_kmers();
  const double P = w.nodes;
  const double L = m.line_bytes;
  const double word_bytes = w.word_bits / 8.0;
  CacheMisses misses;
  misses.phase1 = w.bases_per_read * w.reads / (P * L) + N * word_bytes / (P * L);
  misses.phase2 = (1.0 + N * w.word_bits / (8.0 * P * L)) * word_bytes;
  return misses;
}

inline Phase1Costs phase1_costs(const WorkloadParams& w, const MachineParams& m) {
  w.validate();
  m.validate();
  const double N = w.total_kmers();
  const double P = w.nodes;
  Phase1Costs c;
  c.comp = N / (P * m.c_node);
  c.intra = predicted_cache_misses(w, m).phase1 * m.line_bytes / m.beta_mem;
  c.inter = N * w.word_bits / (4.0 * P * m.beta_link);
  return c;
}

inline Phase2Costs phase2_costs(const WorkloadParams& w, const MachineParams& m) {
  w.validate();
  m.validate();
  const double N = w.total_kmers();
  const double P = w.nodes;
  Phase2Costs c;
  c.comp = N * w.word_bits / (8.0 * P * m.c_node);
  c.intra = predicted_cache_misses(w, m).phase2 * m.line_bytes / m.beta_mem;
  return c;
}

inline CostBreakdown total_time(const WorkloadParams& w, const MachineParams& m, CommMode mode) {
  const Phase1Costs p1 = phase1_costs(w, m);
  const Phase2Costs p2 = phase2_costs(w, m);
  CostBreakdown b;
  b.t_comp1 = p1.comp;
  b.t_intra1 = p1.intra;
  b.t_inter1 = p1.inter;
  b.t_comp2 = p2.comp;
  b.t_intra2 = p2.intra;
  b.t_comm1 = (mode == CommMode::Sum) ? p1.intra + p1.inter : std::max(p1.intra, p1.inter);
  b.t1 = std::max(p1.comp, b.t_comm1);
  b.t2 = std::max(p2.comp, p2.intra);
  b.total = b.t1 + b.t2;

  // Shares assume no compute/communication overlap.
  const double compute = p1.comp + p2.comp;
  const double intra = p1.intra + p2.intra;
  const double inter = p1.inter;
  const double denom = compute + intra + inter;
  b.share_compute = compute / denom;
  b.share_intra = intra / denom;
  b.share_inter = inter / denom;
  return b;
}

inline constexpr const char* kModelCsvHeader =
    "reads,bases_per_read,k,nodes,word_bits,mode,"
    "t_comp1,t_intra1,t_inter1,t_comp2,t_intra2,t_comm1,t1,t2,t_total,"
    "share_compute,share_intranode,share_internode,phase1_misses,phase2_misses";

inline void write_model_csv_row(std::ostream& out, const WorkloadParams& w,
                                const MachineParams& m, CommMode mode) {
  const CostBreakdown b = total_time(w, m, mode);
  const CacheMisses misses = predicted_cache_misses(w, m);
  out << w.reads << ',' << w.bases_per_read << ',' << w.k << ',' << w.nodes << ','
      << w.word_bits << ',' << (mode == CommMode::Sum ? "sum" : "max") << ','
      << b.t_comp1 << ',' << b.t_intra1 << ',' << b.t_inter1 << ','
      << b.t_comp2 << ',' << b.t_intra2 << ',' << b.t_comm1 << ','
      << b.t1 << ',' << b.t2 << ',' << b.total << ','
      << b.share_compute << ',' << b.share_intra << ',' << b.share_inter << ','
      << misses.phase1 << ',' << misses.phase2 << '\n';
}

}  // namespace akount
