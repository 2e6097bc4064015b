#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "spbp/conflicts.hpp"
#include "spbp/topology.hpp"

namespace testing {

using spbp::ConnectivityGraph;
using spbp::LinkId;
using spbp::NodeId;
using spbp::Point;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bidirectional links between every pair of points within `radius`.
inline ConnectivityGraph disk_graph(const std::vector<Point>& pts, double radius) {
  std::vector<std::pair<NodeId, NodeId>> links;
  for (NodeId a = 0; a < static_cast<NodeId>(pts.size()); ++a) {
    for (NodeId b = 0; b < static_cast<NodeId>(pts.size()); ++b) {
      if (a == b) continue;
      const double d = std::hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y);
      if (d <= radius) links.emplace_back(a, b);
    }
  }
  return ConnectivityGraph(pts, std::move(links), radius);
}

/// Nodes on a horizontal line, `spacing` apart, radius 1.
inline ConnectivityGraph line_graph(int n, double spacing = 1.0) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({i * spacing, 0.0});
  return disk_graph(pts, 1.0);
}

/// Uniform points in a square; may be disconnected.
inline ConnectivityGraph random_disk_graph(int n, double side, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
  return disk_graph(pts, radius);
}

/// Dense all-pairs distances by Floyd-Warshall over directed weighted edges.
inline std::vector<std::vector<double>> floyd_warshall(int n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                                                       const std::vector<double>& w) {
  std::vector<std::vector<double>> d(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), kInf));
  for (int i = 0; i < n; ++i) d[i][i] = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto& cell = d[edges[e].first][edges[e].second];
    cell = std::min(cell, w[e]);
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      if (d[i][k] == kInf) continue;
      for (int j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  return d;
}

inline std::vector<std::pair<NodeId, NodeId>> endpoints(const ConnectivityGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& l : g.links()) out.emplace_back(l.src, l.dst);
  return out;
}

/// Reachability by boolean transitive closure.
inline bool all_pairs_reachable(const ConnectivityGraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<char>> r(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) r[i][i] = 1;
  for (const auto& l : g.links()) r[l.src][l.dst] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (r[i][k])
        for (int j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = 1;
  for (const auto& row : r)
    for (char c : row)
      if (!c) return false;
  return true;
}

/// Two links conflict when one's receiver is the other's transmitter, or
/// when either link's receiver suffers from the other's transmitter. A
/// receiver suffers when it cannot null (single antenna, or nullification
/// off) and the aggressor is in range, or when the aggressor is its own
/// single-antenna transmitter serving another stream.
inline bool ach_conflict_oracle(const ConnectivityGraph& g, const spbp::TransceiverSpec& radios, double range,
                                bool nullification, LinkId a, LinkId b) {
  const auto& la = g.link(a);
  const auto& lb = g.link(b);
  if (la.dst == lb.src || lb.dst == la.src) return true;
  const auto suffers = [&](const spbp::Link& victim, const spbp::Link& aggressor) {
    const bool cannot_null = !nullification || radios.antennas[victim.dst] == 1;
    if (!cannot_null) return false;
    if (aggressor.src == victim.src) return radios.antennas[victim.src] == 1;
    return g.distance(aggressor.src, victim.dst) <= range;
  };
  return suffers(la, lb) || suffers(lb, la);
}

inline bool siso_conflict_oracle(const ConnectivityGraph& g, double range, LinkId a, LinkId b) {
  const auto& la = g.link(a);
  const auto& lb = g.link(b);
  const NodeId ea[2] = {la.src, la.dst};
  const NodeId eb[2] = {lb.src, lb.dst};
  for (NodeId x : ea)
    for (NodeId y : eb)
      if (x == y) return true;
  return g.distance(la.src, lb.dst) <= range || g.distance(lb.src, la.dst) <= range;
}

/// Exhaustive maximum-weight independent set value over a small graph
/// given as an adjacency bitmask per vertex. Only positive weights count.
inline double brute_force_mwis(const std::vector<std::uint32_t>& adj, const std::vector<double>& w) {
  const auto n = adj.size();
  double best = 0.0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    bool ok = true;
    double total = 0.0;
    for (std::size_t v = 0; v < n && ok; ++v) {
      if (!(s >> v & 1u)) continue;
      if (adj[v] & s) ok = false;
      total += w[v];
    }
    if (ok) best = std::max(best, total);
  }
  return best;
}

}  // namespace testing
