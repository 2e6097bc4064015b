#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "spbp/topology.hpp"

namespace spbp {

enum class HyperedgeKind { tx, rx };

/// Capacity-attributed hyperedge: the summed cost of scheduled members is
/// bounded by `capacity` per slot.
struct Hyperedge {
  HyperedgeKind kind = HyperedgeKind::tx;
  NodeId owner = 0;
  double capacity = 1.0;
  std::vector<LinkId> members;
};

/// Conflict model over directed links: pairwise edges (capacity 1) plus one
/// tx and one rx hyperedge per node. A SISO conflict graph is the special
/// case where every hyperedge has capacity 1.
class ConflictStructure {
 public:
  ConflictStructure() = default;
  ConflictStructure(int link_count, std::vector<std::pair<LinkId, LinkId>> pair_edges,
                    std::vector<Hyperedge> hyperedges, int node_count);

  int link_count() const noexcept { return static_cast<int>(neighbors_.size()); }

  /// Pairwise neighbours of `e`, ascending id.
  std::span<const LinkId> neighbors(LinkId e) const { return neighbors_.at(static_cast<std::size_t>(e)); }
  bool conflicts(LinkId a, LinkId b) const;

  /// Unique (a, b) pairs with a < b, sorted.
  std::vector<std::pair<LinkId, LinkId>> pair_edges() const;
  std::size_t pair_edge_count() const noexcept { return pair_edge_count_; }

  std::span<const Hyperedge> hyperedges() const noexcept { return hyperedges_; }
  const Hyperedge& tx_hyperedge(NodeId i) const { return hyperedges_.at(tx_index_.at(static_cast<std::size_t>(i))); }
  const Hyperedge& rx_hyperedge(NodeId i) const { return hyperedges_.at(rx_index_.at(static_cast<std::size_t>(i))); }

 private:
  std::vector<std::vector<LinkId>> neighbors_;
  std::vector<Hyperedge> hyperedges_;
  std::vector<std::size_t> tx_index_;
  std::vector<std::size_t> rx_index_;
  std::size_t pair_edge_count_ = 0;
};

/// Two links conflict iff they share an endpoint, or the transmitter of
/// either lies within `interference_range` of the other's receiver.
ConflictStructure build_siso_conflict_graph(const ConnectivityGraph& g, double interference_range);

struct AchOptions {
  double interference_range = 1.5;
  // Multi-antenna receivers null out every external interferer.
  bool nullification = true;
};

/// Attributed capacity hypergraph: half-duplex pair edges, receiver-aware
/// interference pair edges, and per-node tx/rx capacity hyperedges.
ConflictStructure build_ach(const ConnectivityGraph& g, const TransceiverSpec& radios, const AchOptions& options);

/// Transmission cost of a link: air-time fraction for single-antenna
/// transmitters, one stream otherwise. A zero rate on a single-antenna
/// transmitter saturates the link (cost 1).
double tx_cost(double gamma_sum, double realtime_rate, int eta_src);

/// "P e1 e2" per pair edge, then "H kind owner capacity e1 e2 ..." per hyperedge.
void write_conflicts(std::ostream& os, const ConflictStructure& cs);

}  // namespace spbp
