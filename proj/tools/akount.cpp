// Command-line surface: dataset generation, counting with any
// algorithm/topology/config, model evaluation, and output verification.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "akount/counters.hpp"
#include "akount/dataio.hpp"
#include "akount/model.hpp"

namespace {

using json = nlohmann::json;

// Reads per synthetic scale (genome of 2^scale bases, 150-base reads).
const std::map<int, std::uint64_t> kScaleReads = {
    {20, 349500},      {21, 699050},      {22, 1398100},    {23, 2796200},
    {24, 5592400},     {25, 11184800},    {26, 22369600},   {27, 44739200},
    {28, 89478450},    {29, 178956950},   {30, 357913900},  {31, 715827850},
    {32, 1431655750},
};

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed) {
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("AKOUNT_SEED")) return std::strtoull(env, nullptr, 10);
  return 1;
}

akount::TopologyKind parse_topology(const std::string& s) {
  if (s == "1d") return akount::TopologyKind::OneD;
  if (s == "2d") return akount::TopologyKind::TwoD;
  if (s == "3d") return akount::TopologyKind::ThreeD;
  throw CLI::ValidationError("--topology", "must be one of 1d, 2d, 3d");
}

std::string topology_name(akount::TopologyKind kind) {
  switch (kind) {
    case akount::TopologyKind::OneD: return "1d";
    case akount::TopologyKind::TwoD: return "2d";
    case akount::TopologyKind::ThreeD: return "3d";
  }
  return "?";
}

std::string digest_hex(std::uint64_t digest) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << digest;
  return os.str();
}

json report_to_json(const akount::RunReport& r) {
  return json{
      {"algorithm", r.algorithm},
      {"reads", r.reads},
      {"total_kmers", r.total_kmers},
      {"k", r.k},
      {"pes", r.pe_count},
      {"batch", r.batch},
      {"topology", topology_name(r.topology)},
      {"aggregation",
       {{"c1", r.agg.c1}, {"c2", r.agg.c2}, {"c3", r.agg.c3},
        {"l2_enabled", r.agg.l2_enabled}, {"l3_enabled", r.agg.l3_enabled}}},
      {"wall_seconds", r.wall_seconds},
      {"digest", digest_hex(r.digest)},
      {"metrics",
       {{"barriers", r.metrics.barriers},
        {"collective_rounds", r.metrics.collective_rounds},
        {"puts", r.metrics.puts},
        {"payload_bytes", r.metrics.payload_bytes},
        {"header_bytes", r.metrics.header_bytes},
        {"hop_total", r.metrics.hop_total},
        {"per_pe_received", r.metrics.per_pe_received}}},
  };
}

int cmd_generate(std::optional<int> scale, std::uint64_t genome_len, std::uint64_t n_reads,
                 std::uint64_t read_len, std::optional<double> coverage,
                 std::optional<std::uint64_t> flag_seed, const std::string& skew_motif,
                 double skew_frac, const std::string& out_path) {
  const std::uint64_t seed = resolve_seed(flag_seed);
  if (scale) {
    genome_len = std::uint64_t{1} << *scale;
    read_len = 150;
    auto it = kScaleReads.find(*scale);
    if (coverage) {
      n_reads = static_cast<std::uint64_t>(*coverage * static_cast<double>(genome_len) /
                                               static_cast<double>(read_len) + 0.5);
    } else if (it != kScaleReads.end()) {
      n_reads = it->second;
    } else {
      n_reads = static_cast<std::uint64_t>(50.0 * static_cast<double>(genome_len) /
                                               static_cast<double>(read_len) + 0.5);
    }
  } else if (coverage) {
    n_reads = static_cast<std::uint64_t>(*coverage * static_cast<double>(genome_len) /
                                             static_cast<double>(read_len) + 0.5);
  }
  if (genome_len == 0 || n_reads == 0 || read_len == 0) {
    std::cerr << "generate: need --scale or --genome-len/--reads/--read-len\n";
    return 1;
  }

  std::string genome = skew_motif.empty()
      ? akount::generate_genome(genome_len, seed)
      : akount::generate_skewed_genome(genome_len, skew_motif, skew_frac, seed);
  auto reads = akount::generate_reads(genome, read_len, n_reads, seed + 1);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "generate: cannot write " << out_path << "\n";
    return 1;
  }
  const std::string qual(read_len, 'F');
  for (std::size_t i = 0; i < reads.size(); ++i)
    out << "@r" << i << '\n' << reads[i] << "\n+\n" << qual << '\n';

  json manifest{{"genome_len", genome_len}, {"reads", n_reads},      {"read_len", read_len},
                {"seed", seed},             {"skew_motif", skew_motif}, {"skew_frac", skew_frac},
                {"output", out_path}};
  std::ofstream mf(out_path + ".manifest.json");
  mf << manifest.dump(2) << '\n';
  std::cout << "wrote " << reads.size() << " reads to " << out_path << "\n";
  return 0;
}

int cmd_count(const std::string& input, int k, const std::string& algo, int pes,
              std::uint64_t batch, const std::string& topology_str,
              const akount::AggregationConfig& agg, std::size_t c0, bool parallel,
              const std::string& out_path, const std::string& report_path, bool text) {
  if (k < 1 || k > akount::kMaxK) {
    std::cerr << "count: k must be in [1, " << akount::kMaxK << "]\n";
    return 1;
  }
  std::ifstream in(input, std::ios::binary);
  if (!in) {
    std::cerr << "count: cannot read " << input << "\n";
    return 1;
  }
  const auto reads = akount::parse_reads(in);

  akount::CountResult result;
  if (algo == "serial") {
    const auto t0 = std::chrono::steady_clock::now();
    result.records = akount::count_serial(reads, k);
    result.report.algorithm = "serial";
    result.report.reads = reads.size();
    for (const auto& r : result.records) result.report.total_kmers += r.count;
    result.report.k = k;
    result.report.pe_count = 1;
    result.report.metrics.per_pe_received.assign(1, 0);
    result.report.digest = akount::count_digest(result.records);
    result.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } else if (algo == "bsp") {
    akount::Engine engine(pes, akount::TopologyKind::OneD, c0, [](int, const akount::PacketView&) {});
    result = akount::count_bsp(reads, k, batch, engine);
  } else if (algo == "fabsp") {
    result = akount::count_fabsp(reads, k, pes, parse_topology(topology_str), agg, c0, parallel);
  } else {
    std::cerr << "count: unknown --algo " << algo << "\n";
    return 1;
  }
  result.report.k = k;

  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "count: cannot write " << out_path << "\n";
      return 1;
    }
    if (text)
      akount::write_counts_text(out, result.records, k);
    else
      akount::write_counts(out, result.records, static_cast<std::uint32_t>(k));
  }
  const json report = report_to_json(result.report);
  if (!report_path.empty()) {
    std::ofstream rf(report_path);
    rf << report.dump(2) << '\n';
  } else {
    std::cout << report.dump(2) << '\n';
  }
  return 0;
}

int cmd_model(std::optional<int> scale, double n_reads, double read_len, int k,
              const std::vector<int>& nodes, const std::string& mode,
              const akount::MachineParams& machine, const std::string& out_path) {
  akount::WorkloadParams w;
  if (scale) {
    auto it = kScaleReads.find(*scale);
    w.reads = (it != kScaleReads.end())
                  ? static_cast<double>(it->second)
                  : 50.0 * static_cast<double>(std::uint64_t{1} << *scale) / 150.0;
    w.bases_per_read = 150;
  } else {
    w.reads = n_reads;
    w.bases_per_read = read_len;
  }
  w.k = k;

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      std::cerr << "model: cannot write " << out_path << "\n";
      return 1;
    }
    out = &file;
  }
  *out << akount::kModelCsvHeader << '\n';
  std::vector<akount::CommMode> modes;
  if (mode == "sum") modes = {akount::CommMode::Sum};
  else if (mode == "max") modes = {akount::CommMode::Max};
  else modes = {akount::CommMode::Sum, akount::CommMode::Max};
  for (int p : nodes) {
    w.nodes = p;
    for (auto m : modes) akount::write_model_csv_row(*out, w, machine, m);
  }
  return 0;
}

int cmd_verify(const std::string& path_a, const std::string& path_b) {
  akount::CountData a, b;
  try {
    std::ifstream fa(path_a, std::ios::binary), fb(path_b, std::ios::binary);
    if (!fa || !fb) {
      std::cerr << "verify: cannot open input\n";
      return 2;
    }
    a = akount::read_counts(fa);
    b = akount::read_counts(fb);
  } catch (const std::exception& e) {
    std::cerr << "verify: " << e.what() << "\n";
    return 2;
  }
  if (a.k != b.k) {
    std::cerr << "verify: k mismatch (" << a.k << " vs " << b.k << ")\n";
    return 2;
  }
  if (a.records == b.records) return 0;

  int shown = 0;
  std::size_t i = 0, j = 0;
  while ((i < a.records.size() || j < b.records.size()) && shown < 10) {
    if (j >= b.records.size() ||
        (i < a.records.size() && a.records[i].kmer < b.records[j].kmer)) {
      std::cout << "only in a: " << akount::decode_kmer(a.records[i].kmer, static_cast<int>(a.k))
                << " x" << a.records[i].count << "\n";
      ++i, ++shown;
    } else if (i >= a.records.size() || b.records[j].kmer < a.records[i].kmer) {
      std::cout << "only in b: " << akount::decode_kmer(b.records[j].kmer, static_cast<int>(a.k))
                << " x" << b.records[j].count << "\n";
      ++j, ++shown;
    } else {
      if (a.records[i].count != b.records[j].count) {
        std::cout << "count differs: " << akount::decode_kmer(a.records[i].kmer, static_cast<int>(a.k))
                  << " a=" << a.records[i].count << " b=" << b.records[j].count << "\n";
        ++shown;
      }
      ++i, ++j;
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-mer counting testbed: synthetic data, serial/BSP/FA-BSP counters, cost model"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic FASTQ dataset");
  std::optional<int> gen_scale;
  std::uint64_t gen_len = 0, gen_reads = 0, gen_read_len = 150;
  std::optional<double> gen_coverage;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_motif;
  double gen_frac = 0.0;
  std::string gen_out = "reads.fq";
  gen->add_option("--scale", gen_scale, "Synthetic scale: genome of 2^scale bases, table read count");
  gen->add_option("--genome-len", gen_len, "Genome length in bases");
  gen->add_option("--reads", gen_reads, "Number of reads");
  gen->add_option("--read-len", gen_read_len, "Read length")->capture_default_str();
  gen->add_option("--coverage", gen_coverage, "Derive read count from coverage");
  gen->add_option("--seed", gen_seed, "PRNG seed (fallback: AKOUNT_SEED, then 1)");
  gen->add_option("--skew-motif", gen_motif, "Heavy-hitter motif, e.g. AATGG");
  gen->add_option("--skew-frac", gen_frac, "Fraction of the genome tiled with the motif");
  gen->add_option("-o,--output", gen_out, "Output FASTQ path")->capture_default_str();

  // count
  auto* cnt = app.add_subcommand("count", "Count k-mers of a FASTA/FASTQ file");
  std::string cnt_in, cnt_algo = "fabsp", cnt_topo = "1d", cnt_out, cnt_report;
  int cnt_k = 31, cnt_pes = 4;
  std::uint64_t cnt_batch = 1000000000ULL;
  akount::AggregationConfig cnt_agg;
  std::size_t cnt_c0 = 4096;
  bool cnt_parallel = false, cnt_text = false;
  cnt->add_option("-i,--input", cnt_in, "Input FASTA/FASTQ file")->required();
  cnt->add_option("-k", cnt_k, "k-mer length (<= 31)")->capture_default_str();
  cnt->add_option("--algo", cnt_algo, "serial | bsp | fabsp")->capture_default_str();
  cnt->add_option("--pes", cnt_pes, "Virtual PE count")->capture_default_str();
  cnt->add_option("--batch", cnt_batch, "BSP batch size b")->capture_default_str();
  cnt->add_option("--topology", cnt_topo, "1d | 2d | 3d")->capture_default_str();
  cnt->add_option("--c0", cnt_c0, "L0 buffer capacity in words")->capture_default_str();
  cnt->add_option("--c1", cnt_agg.c1, "L1 handoff threshold in words")->capture_default_str();
  cnt->add_option("--c2", cnt_agg.c2, "Words per NORMAL packet")->capture_default_str();
  cnt->add_option("--c3", cnt_agg.c3, "L3 buffer length")->capture_default_str();
  cnt->add_option("--l2", cnt_agg.l2_enabled, "Enable L2 packetization")->capture_default_str();
  cnt->add_option("--l3", cnt_agg.l3_enabled, "Enable L3 heavy-hitter pre-aggregation")->capture_default_str();
  cnt->add_flag("--parallel", cnt_parallel, "One thread per PE instead of the deterministic scheduler");
  cnt->add_option("-o,--output", cnt_out, "Counts output file");
  cnt->add_option("--report", cnt_report, "Write the run report JSON here instead of stdout");
  cnt->add_flag("--text", cnt_text, "Write counts as <kmer>\\t<count> text");

  // model
  auto* mdl = app.add_subcommand("model", "Evaluate the analytical cost model (CSV)");
  std::optional<int> mdl_scale;
  double mdl_reads = 0, mdl_read_len = 150;
  int mdl_k = 31;
  std::vector<int> mdl_nodes{32};
  std::string mdl_mode = "sum", mdl_out;
  akount::MachineParams mdl_machine;
  mdl->add_option("--scale", mdl_scale, "Synthetic scale workload");
  mdl->add_option("--reads", mdl_reads, "Read count n");
  mdl->add_option("--read-len", mdl_read_len, "Bases per read m")->capture_default_str();
  mdl->add_option("-k", mdl_k, "k-mer length")->capture_default_str();
  mdl->add_option("--nodes", mdl_nodes, "Node counts P (repeatable)")->capture_default_str();
  mdl->add_option("--mode", mdl_mode, "sum | max | both")->capture_default_str();
  mdl->add_option("--c-node", mdl_machine.c_node, "Peak INT64 ops/s per node")->capture_default_str();
  mdl->add_option("--beta-mem", mdl_machine.beta_mem, "Memory bandwidth bytes/s")->capture_default_str();
  mdl->add_option("--cache", mdl_machine.cache_bytes, "Cache size Z in bytes")->capture_default_str();
  mdl->add_option("--line", mdl_machine.line_bytes, "Cache-line size L in bytes")->capture_default_str();
  mdl->add_option("--beta-link", mdl_machine.beta_link, "Combined bidirectional NIC bytes/s")->capture_default_str();
  mdl->add_option("-o,--output", mdl_out, "CSV output path (default stdout)");

  // verify
  auto* ver = app.add_subcommand("verify", "Compare two count files (exit 0 equal, 1 diff, 2 k mismatch)");
  std::string ver_a, ver_b;
  ver->add_option("a", ver_a, "First count file")->required();
  ver->add_option("b", ver_b, "Second count file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(gen_scale, gen_len, gen_reads, gen_read_len, gen_coverage, gen_seed,
                          gen_motif, gen_frac, gen_out);
    if (cnt->parsed())
      return cmd_count(cnt_in, cnt_k, cnt_algo, cnt_pes, cnt_batch, cnt_topo, cnt_agg, cnt_c0,
                       cnt_parallel, cnt_out, cnt_report, cnt_text);
    if (mdl->parsed())
      return cmd_model(mdl_scale, mdl_reads, mdl_read_len, mdl_k, mdl_nodes, mdl_mode,
                       mdl_machine, mdl_out);
    if (ver->parsed()) return cmd_verify(ver_a, ver_b);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
