#include "spbp/local_conflict.hpp"

#include <algorithm>
#include <numeric>

namespace spbp {

bool LocalConflictGraph::contains(LinkId e) const {
  return std::find(vertices.begin(), vertices.end(), e) != vertices.end();
}

double LocalConflictGraph::weight_of(LinkId e) const {
  const auto it = std::find(vertices.begin(), vertices.end(), e);
  return it == vertices.end() ? 0.0 : weights[static_cast<std::size_t>(it - vertices.begin())];
}

std::vector<LinkId> LocalConflictGraph::neighbors(LinkId e) const {
  std::vector<LinkId> out;
  for (auto [a, b] : edges) {
    if (a == e) out.push_back(b);
    if (b == e) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LocalConflictGraph build_local_conflict_graph(NodeId device, std::optional<RtsMessage> own,
                                              std::span<const LinkId> incoming_links,
                                              std::span<const RtsMessage> received, const ConnectivityGraph& g,
                                              const ConflictStructure& cs) {
  LocalConflictGraph lcg;
  if (own) {
    lcg.vertices.push_back(own->link);
    lcg.weights.push_back(own->weight);
  }
  for (const auto& rts : received) {
    if (own && rts.link == own->link) continue;
    if (lcg.contains(rts.link)) continue;
    const bool targets_me = g.link(rts.link).dst == device;
    const bool hits_own = own && cs.conflicts(own->link, rts.link);
    const bool hits_incoming = std::any_of(incoming_links.begin(), incoming_links.end(),
                                           [&](LinkId in) { return cs.conflicts(in, rts.link); });
    if (targets_me || hits_own || hits_incoming) {
      lcg.vertices.push_back(rts.link);
      lcg.weights.push_back(rts.weight);
    }
  }
  const auto observable = [&](LinkId e) { return (own && e == own->link) || g.link(e).dst == device; };
  for (std::size_t a = 0; a < lcg.vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < lcg.vertices.size(); ++b) {
      const LinkId ea = lcg.vertices[a];
      const LinkId eb = lcg.vertices[b];
      if ((observable(ea) || observable(eb)) && cs.conflicts(ea, eb)) lcg.edges.emplace_back(ea, eb);
    }
  }
  return lcg;
}

std::vector<LinkId> greedy_mwis_local(const LocalConflictGraph& lcg) {
  const std::size_t n = lcg.vertices.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (lcg.weights[a] != lcg.weights[b]) return lcg.weights[a] > lcg.weights[b];
    return lcg.vertices[a] < lcg.vertices[b];
  });
  std::vector<char> muted(n, 0);
  const auto slot_of = [&](LinkId e) {
    return static_cast<std::size_t>(std::find(lcg.vertices.begin(), lcg.vertices.end(), e) - lcg.vertices.begin());
  };
  std::vector<LinkId> chosen;
  for (std::size_t idx : order) {
    if (muted[idx] || !(lcg.weights[idx] > 0.0)) continue;
    const LinkId e = lcg.vertices[idx];
    chosen.push_back(e);
    for (auto [a, b] : lcg.edges) {
      if (a == e) muted[slot_of(b)] = 1;
      if (b == e) muted[slot_of(a)] = 1;
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace spbp
