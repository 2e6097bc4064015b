#include "spbp/conflicts.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace spbp {

ConflictStructure::ConflictStructure(int link_count, std::vector<std::pair<LinkId, LinkId>> pair_edges,
                                     std::vector<Hyperedge> hyperedges, int node_count)
    : neighbors_(static_cast<std::size_t>(link_count)),
      hyperedges_(std::move(hyperedges)),
      tx_index_(static_cast<std::size_t>(node_count), static_cast<std::size_t>(-1)),
      rx_index_(static_cast<std::size_t>(node_count), static_cast<std::size_t>(-1)) {
  for (auto [a, b] : pair_edges) {
    if (a == b) throw std::invalid_argument("pair edge must join distinct links");
    if (a < 0 || b < 0 || a >= link_count || b >= link_count) throw std::out_of_range("pair edge link id");
    neighbors_[static_cast<std::size_t>(a)].push_back(b);
    neighbors_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& adj : neighbors_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    pair_edge_count_ += adj.size();
  }
  pair_edge_count_ /= 2;
  for (std::size_t h = 0; h < hyperedges_.size(); ++h) {
    auto& he = hyperedges_[h];
    std::sort(he.members.begin(), he.members.end());
    auto& index = he.kind == HyperedgeKind::tx ? tx_index_ : rx_index_;
    index.at(static_cast<std::size_t>(he.owner)) = h;
  }
}

bool ConflictStructure::conflicts(LinkId a, LinkId b) const {
  const auto adj = neighbors(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<std::pair<LinkId, LinkId>> ConflictStructure::pair_edges() const {
  std::vector<std::pair<LinkId, LinkId>> out;
  out.reserve(pair_edge_count_);
  for (LinkId a = 0; a < link_count(); ++a) {
    for (LinkId b : neighbors(a)) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

namespace {

std::vector<Hyperedge> node_hyperedges(const ConnectivityGraph& g, const TransceiverSpec& radios) {
  std::vector<Hyperedge> hs;
  hs.reserve(static_cast<std::size_t>(2 * g.node_count()));
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto out = g.out_links(i);
    const auto in = g.in_links(i);
    hs.push_back({HyperedgeKind::tx, i, radios.eta_tx.at(static_cast<std::size_t>(i)), {out.begin(), out.end()}});
    hs.push_back({HyperedgeKind::rx, i, static_cast<double>(radios.eta_rx.at(static_cast<std::size_t>(i))),
                  {in.begin(), in.end()}});
  }
  return hs;
}

}  // namespace

ConflictStructure build_siso_conflict_graph(const ConnectivityGraph& g, double interference_range) {
  std::vector<std::pair<LinkId, LinkId>> edges;
  const auto links = g.links();
  for (std::size_t a = 0; a < links.size(); ++a) {
    const auto& la = links[a];
    for (std::size_t b = a + 1; b < links.size(); ++b) {
      const auto& lb = links[b];
      const bool shared = la.src == lb.src || la.src == lb.dst || la.dst == lb.src || la.dst == lb.dst;
      const bool interferes = g.distance(la.src, lb.dst) <= interference_range ||
                              g.distance(lb.src, la.dst) <= interference_range;
      if (shared || interferes) edges.emplace_back(la.id, lb.id);
    }
  }
  return ConflictStructure(g.link_count(), std::move(edges),
                           node_hyperedges(g, TransceiverSpec::siso(g.node_count())), g.node_count());
}

ConflictStructure build_ach(const ConnectivityGraph& g, const TransceiverSpec& radios, const AchOptions& options) {
  if (radios.node_count() != g.node_count()) throw std::invalid_argument("build_ach: radio spec size mismatch");
  const auto vulnerable = [&](NodeId rx) {
    return !options.nullification || radios.antennas[static_cast<std::size_t>(rx)] == 1;
  };
  const auto in_range = [&](NodeId tx, NodeId rx) { return g.distance(tx, rx) <= options.interference_range; };

  std::vector<std::pair<LinkId, LinkId>> edges;
  const auto links = g.links();
  for (std::size_t a = 0; a < links.size(); ++a) {
    const auto& la = links[a];
    for (std::size_t b = a + 1; b < links.size(); ++b) {
      const auto& lb = links[b];
      bool conflict = false;
      if (la.dst == lb.src || lb.dst == la.src) {
        // Half-duplex: one link's receiver is the other's transmitter.
        conflict = true;
      } else if (la.src == lb.src) {
        // Streams of one transmitter: a multi-antenna transmitter separates
        // them spatially and its tx hyperedge bounds the count. A single
        // antenna transmitter still leaks onto a receiver that cannot null.
        conflict = radios.antennas[static_cast<std::size_t>(la.src)] == 1 && (vulnerable(la.dst) || vulnerable(lb.dst));
      } else {
        // Distinct transmitters (shared receiver included): the interferer
        // must be in range of a receiver that cannot null it.
        conflict = (in_range(lb.src, la.dst) && vulnerable(la.dst)) || (in_range(la.src, lb.dst) && vulnerable(lb.dst));
      }
      if (conflict) edges.emplace_back(la.id, lb.id);
    }
  }
  return ConflictStructure(g.link_count(), std::move(edges), node_hyperedges(g, radios), g.node_count());
}

double tx_cost(double gamma_sum, double realtime_rate, int eta_src) {
  if (eta_src > 1) return 1.0;
  if (realtime_rate <= 0.0) return 1.0;
  return std::clamp(gamma_sum / realtime_rate, 0.0, 1.0);
}

void write_conflicts(std::ostream& os, const ConflictStructure& cs) {
  for (auto [a, b] : cs.pair_edges()) os << "P " << a << ' ' << b << '\n';
  for (const auto& h : cs.hyperedges()) {
    os << "H " << (h.kind == HyperedgeKind::tx ? "tx" : "rx") << ' ' << h.owner << ' ' << h.capacity;
    for (LinkId e : h.members) os << ' ' << e;
    os << '\n';
  }
}

}  // namespace spbp
