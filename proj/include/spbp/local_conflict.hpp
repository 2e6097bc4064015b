#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "spbp/conflicts.hpp"
#include "spbp/topology.hpp"

namespace spbp {

/// RTS payload: a transmitter's candidate link and its utility.
struct RtsMessage {
  LinkId link = 0;
  double weight = 0.0;
};

/// Conflict graph a device assembles from the RTS messages it overheard.
/// vertices[n] carries weights[n]; edges index into `vertices` by link id.
struct LocalConflictGraph {
  std::vector<LinkId> vertices;
  std::vector<double> weights;
  std::vector<std::pair<LinkId, LinkId>> edges;

  bool contains(LinkId e) const;
  double weight_of(LinkId e) const;
  /// Local neighbours of `e`.
  std::vector<LinkId> neighbors(LinkId e) const;
};

/// Device `device` keeps its own candidate plus every overheard request that
/// targets it, conflicts with its own candidate, or would interfere one of
/// its incoming links. Edges are the conflicts it can observe: those
/// touching its own candidate or a request addressed to it. Which requests
/// interfere is read off the global conflict structure restricted to the
/// device's links.
LocalConflictGraph build_local_conflict_graph(NodeId device, std::optional<RtsMessage> own,
                                              std::span<const LinkId> incoming_links,
                                              std::span<const RtsMessage> received, const ConnectivityGraph& g,
                                              const ConflictStructure& cs);

/// Greedy maximum-weight independent set: visit vertices by decreasing
/// weight (lower id first on ties), keep every unmuted positive-weight
/// vertex and mute its neighbours. Result is sorted by link id.
std::vector<LinkId> greedy_mwis_local(const LocalConflictGraph& lcg);

}  // namespace spbp
