#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

// Virtual topologies for PE-to-PE routing: 1D (all-connected, 1 hop),
// 2D grid (row/column neighbors, <= 2 hops), 3D grid (<= 3 hops).
// Dimension-order routing corrects the fastest-varying coordinate first.
// Grids are padded to near-square/near-cube shapes; cells with id >= P
// are absent and routing skips them.

namespace akount {

enum class TopologyKind { OneD, TwoD, ThreeD };

struct Topology {
  TopologyKind kind;
  int pe_count;
  std::array<int, 3> dims;  // unused axes are 1

  static Topology make(TopologyKind kind, int pe_count) {
    assert(pe_count >= 1);
    Topology t{kind, pe_count, {1, 1, 1}};
    switch (kind) {
      case TopologyKind::OneD:
        t.dims = {pe_count, 1, 1};
        break;
      case TopologyKind::TwoD: {
        int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(pe_count))));
        int rows = (pe_count + cols - 1) / cols;
        t.dims = {rows, cols, 1};
        break;
      }
      case TopologyKind::ThreeD: {
        int d0 = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(pe_count))));
        int rest = (pe_count + d0 - 1) / d0;
        int d2 = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(rest))));
        int d1 = (rest + d2 - 1) / d2;
        t.dims = {d0, d1, d2};
        break;
      }
    }
    return t;
  }

  int max_hops() const {
    switch (kind) {
      case TopologyKind::OneD: return 1;
      case TopologyKind::TwoD: return 2;
      case TopologyKind::ThreeD: return 3;
    }
    return 0;
  }

  std::array<int, 3> coords(int pe) const {
    const int plane = dims[1] * dims[2];
    return {pe / plane, (pe % plane) / dims[2], pe % dims[2]};
  }

  int id_of(const std::array<int, 3>& c) const {
    return (c[0] * dims[1] + c[1]) * dims[2] + c[2];
  }

  /// Next PE on the path from src to dst; src if already there. Absent
  /// intermediate cells are skipped (the remaining corrections happen in
  /// one hop straight to dst).
  int next_hop(int src, int dst) const {
    if (src == dst) return src;
    if (kind == TopologyKind::OneD) return dst;
    const auto cs = coords(src);
    const auto cd = coords(dst);
    for (int axis = 2; axis >= 0; --axis) {
      if (cs[axis] == cd[axis]) continue;
      auto cand = cs;
      cand[axis] = cd[axis];
      int id = id_of(cand);
      if (id < pe_count) return id;
    }
    return dst;
  }

  /// Hops a packet traverses from src to dst under next_hop.
  int hop_count(int src, int dst) const {
    int hops = 0;
    int at = src;
    while (at != dst) {
      at = next_hop(at, dst);
      ++hops;
      assert(hops <= max_hops());
    }
    return hops;
  }

  /// Present PEs reachable in one hop from pe (cells sharing an axis
  /// line), including pe itself. This is the per-PE L0 buffer count.
  std::vector<int> neighbors(int pe) const {
    std::vector<int> out;
    if (kind == TopologyKind::OneD) {
      out.resize(static_cast<std::size_t>(pe_count));
      for (int q = 0; q < pe_count; ++q) out[static_cast<std::size_t>(q)] = q;
      return out;
    }
    const auto c = coords(pe);
    out.push_back(pe);
    for (int axis = 0; axis < 3; ++axis) {
      for (int v = 0; v < dims[axis]; ++v) {
        if (v == c[axis]) continue;
        auto q = c;
        q[axis] = v;
        int id = id_of(q);
        if (id < pe_count) out.push_back(id);
      }
    }
    return out;
  }

  int neighbor_count(int pe) const {
    return static_cast<int>(neighbors(pe).size());
  }
};

}  // namespace akount
