#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "akount/packet.hpp"
#include "akount/topology.hpp"

// Deterministic in-process virtual-PE engine. Each PE stages outgoing
// packets in per-neighbor L0 buffers; a buffer is transferred as one PUT
// when it reaches c0 payload words or when drained by a barrier.
// Intermediate PEs on 2D/3D topologies forward transit packets toward
// their final destination. The global barrier is quiescence-based: it
// completes only when every in-flight packet (including forwarded and
// handler-generated ones) has been delivered and handled.
//
// Two execution modes with identical counting results: the default
// deterministic mode steps PEs round-robin on one thread; run_parallel
// binds each PE to its own thread (send-side state stays PE-private,
// inboxes are mutex-guarded, handler invocations per PE are serialized).

namespace akount {

struct PacketView {
  int dest;
  PacketType type;
  std::span<const std::uint64_t> words;
};

using PacketHandler = std::function<void(int pe, const PacketView&)>;

struct EngineMetrics {
  std::uint64_t barriers = 0;
  std::uint64_t collective_rounds = 0;
  std::uint64_t puts = 0;
  std::uint64_t payload_bytes = 0;
  std::uint64_t header_bytes = 0;
  std::uint64_t hop_total = 0;
  std::vector<std::uint64_t> per_pe_received;
};

class Engine {
 public:
  Engine(int pe_count, TopologyKind kind, std::size_t c0, PacketHandler handler)
      : topo_(Topology::make(kind, pe_count)),
        c0_(c0),
        handler_(std::move(handler)),
        pes_(static_cast<std::size_t>(pe_count)) {
    if (pe_count < 1 || static_cast<std::uint32_t>(pe_count) > kMaxPacketDest + 1)
      throw std::invalid_argument("PE count out of range");
    if (c0 < 1) throw std::invalid_argument("L0 capacity must be >= 1");
    for (int pe = 0; pe < pe_count; ++pe)
      for (int nbr : topo_.neighbors(pe))
        pes_[static_cast<std::size_t>(pe)].l0.emplace(nbr, L0Buffer{});
  }

  const Topology& topology() const { return topo_; }
  int pe_count() const { return topo_.pe_count; }
  std::size_t l0_buffer_count(int pe) const { return pes_[static_cast<std::size_t>(pe)].l0.size(); }

  /// Stage a packet from src toward dst. Must be called on src's
  /// execution context. Self-sends bypass the network: the handler runs
  /// immediately and no remote bytes are accounted.
  void inject(int src, int dst, PacketType type, std::span<const std::uint64_t> words) {
    assert(!words.empty() && words.size() <= kMaxPacketElems);
    assert(dst >= 0 && dst < pe_count());
    auto& pe = pes_[static_cast<std::size_t>(src)];
    if (dst == src) {
      handler_(src, PacketView{dst, type, words});
      pe.received += words.size();
      return;
    }
    StagedPacket pkt;
    pkt.header = encode_header(static_cast<std::uint32_t>(dst), type,
                               static_cast<std::uint32_t>(words.size()));
    pkt.body.assign(words.begin(), words.end());
    stage(src, std::move(pkt));
  }

  /// Drain pe's receive buffer: handle packets addressed to pe, forward
  /// transit packets toward their destination. Returns true if any
  /// packet moved.
  bool progress(int pe) {
    auto& state = pes_[static_cast<std::size_t>(pe)];
    std::vector<StagedPacket> batch;
    {
      std::lock_guard lock(state.inbox_mu);
      batch.swap(state.inbox);
    }
    if (batch.empty()) return false;
    for (auto& pkt : batch) {
      const PacketHeader hdr = decode_header(pkt.header);
      if (static_cast<int>(hdr.dest) == pe) {
        handler_(pe, PacketView{pe, hdr.type, pkt.body});
        state.received += pkt.body.size();
      } else {
        stage(pe, std::move(pkt));
      }
    }
    return true;
  }

  /// Quiescence barrier: flushes every partial L0 buffer and loops
  /// delivery until no packet is in flight. Counts as one barrier
  /// regardless of internal iterations.
  void global_barrier() {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int pe = 0; pe < pe_count(); ++pe) {
        auto& state = pes_[static_cast<std::size_t>(pe)];
        for (auto& [nbr, buf] : state.l0) {
          if (buf.payload_words > 0) {
            put(pe, nbr, buf);
            moved = true;
          }
        }
        if (progress(pe)) moved = true;
      }
    }
    ++barriers_;
  }

  /// Run one PE-local work function per PE on independent threads
  /// (parallel mode). Send-side staging is PE-private; only inbox PUTs
  /// cross threads.
  template <class Fn>
  void run_parallel(Fn&& per_pe) {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(pe_count()));
    for (int pe = 0; pe < pe_count(); ++pe)
      threads.emplace_back([&per_pe, pe] { per_pe(pe); });
    for (auto& t : threads) t.join();
  }

  /// Simulated synchronous many-to-many exchange for the BSP baseline:
  /// send[src][dst] is appended to recv[dst]; counts one collective
  /// round.
  template <class T>
  void collective_exchange(const std::vector<std::vector<std::vector<T>>>& send,
                           std::vector<std::vector<T>>& recv) {
    for (int src = 0; src < pe_count(); ++src) {
      for (int dst = 0; dst < pe_count(); ++dst) {
        const auto& items = send[static_cast<std::size_t>(src)][static_cast<std::size_t>(dst)];
        if (items.empty()) continue;
        auto& inbox = recv[static_cast<std::size_t>(dst)];
        inbox.insert(inbox.end(), items.begin(), items.end());
        if (src != dst)
          pes_[static_cast<std::size_t>(src)].payload_bytes += items.size() * sizeof(T);
        pes_[static_cast<std::size_t>(dst)].received += items.size();
      }
    }
    ++collective_rounds_;
  }

  EngineMetrics metrics_snapshot() const {
    EngineMetrics m;
    m.barriers = barriers_;
    m.collective_rounds = collective_rounds_;
    m.per_pe_received.resize(static_cast<std::size_t>(pe_count()));
    for (int pe = 0; pe < pe_count(); ++pe) {
      const auto& s = pes_[static_cast<std::size_t>(pe)];
      m.puts += s.puts;
      m.payload_bytes += s.payload_bytes;
      m.header_bytes += s.header_bytes;
      m.hop_total += s.hop_total;
      m.per_pe_received[static_cast<std::size_t>(pe)] = s.received;
    }
    return m;
  }

 private:
  struct StagedPacket {
    std::uint32_t header;
    std::vector<std::uint64_t> body;
  };

  struct L0Buffer {
    std::vector<StagedPacket> packets;
    std::size_t payload_words = 0;
  };

  struct PeState {
    std::unordered_map<int, L0Buffer> l0;
    std::vector<StagedPacket> inbox;
    std::mutex inbox_mu;
    std::uint64_t puts = 0;
    std::uint64_t payload_bytes = 0;
    std::uint64_t header_bytes = 0;
    std::uint64_t hop_total = 0;
    std::uint64_t received = 0;
  };

  void stage(int at, StagedPacket&& pkt) {
    const int dest = static_cast<int>(decode_header(pkt.header).dest);
    const int hop = topo_.next_hop(at, dest);
    auto& state = pes_[static_cast<std::size_t>(at)];
    auto& buf = state.l0.at(hop);
    buf.payload_words += pkt.body.size();
    buf.packets.push_back(std::move(pkt));
    if (buf.payload_words >= c0_) put(at, hop, buf);
  }

  void put(int src, int nbr, L0Buffer& buf) {
    auto& state = pes_[static_cast<std::size_t>(src)];
    ++state.puts;
    for (const auto& pkt : buf.packets) {
      state.header_bytes += kHeaderBytes;
      state.payload_bytes += pkt.body.size() * sizeof(std::uint64_t);
      ++state.hop_total;
    }
    auto& dst = pes_[static_cast<std::size_t>(nbr)];
    {
      std::lock_guard lock(dst.inbox_mu);
      dst.inbox.insert(dst.inbox.end(), std::make_move_iterator(buf.packets.begin()),
                       std::make_move_iterator(buf.packets.end()));
    }
    buf.packets.clear();
    buf.payload_words = 0;
  }

  Topology topo_;
  std::size_t c0_;
  PacketHandler handler_;
  std::vector<PeState> pes_;
  std::uint64_t barriers_ = 0;
  std::uint64_t collective_rounds_ = 0;
};

}  // namespace akount
