#include "spbp/bias.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <string>

namespace spbp {

std::vector<double> edge_weights(const LinkRates& rates, BiasScheme scheme) {
  const auto& r = rates.long_term;
  if (r.empty()) return {};
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
  std::vector<double> w(r.size(), mean);
  if (scheme == BiasScheme::sp_rbar_rmax_over_r) {
    const double rmax = *std::max_element(r.begin(), r.end());
    for (std::size_t e = 0; e < r.size(); ++e) w[e] = mean * rmax / r[e];
  }
  return w;
}

BiasMatrix::BiasMatrix(int node_count, std::vector<NodeId> commodities)
    : nodes_(node_count),
      commodities_(std::move(commodities)),
      values_(static_cast<std::size_t>(node_count) * commodities_.size(), 0.0) {}

BiasMatrix compute_bias(const ConnectivityGraph& g, std::span<const double> weights, std::vector<NodeId> commodities) {
  if (weights.size() != static_cast<std::size_t>(g.link_count())) {
    throw std::invalid_argument("compute_bias: one weight per link required");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("compute_bias: weights must be positive");
  }
  BiasMatrix bias(g.node_count(), std::move(commodities));
  constexpr double kInf = std::numeric_limits<double>::infinity();
  using Entry = std::pair<double, NodeId>;
  std::vector<double> dist(static_cast<std::size_t>(g.node_count()));

  for (int k = 0; k < bias.commodity_count(); ++k) {
    const NodeId c = bias.commodities()[static_cast<std::size_t>(k)];
    if (c < 0 || c >= g.node_count()) throw std::out_of_range("compute_bias: commodity is not a node");
    std::fill(dist.begin(), dist.end(), kInf);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[static_cast<std::size_t>(c)] = 0.0;
    heap.emplace(0.0, c);
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[static_cast<std::size_t>(v)]) continue;
      for (LinkId e : g.in_links(v)) {
        const NodeId u = g.link(e).src;
        const double nd = d + weights[static_cast<std::size_t>(e)];
        if (nd < dist[static_cast<std::size_t>(u)]) {
          dist[static_cast<std::size_t>(u)] = nd;
          heap.emplace(nd, u);
        }
      }
    }
    for (NodeId i = 0; i < g.node_count(); ++i) {
      if (dist[static_cast<std::size_t>(i)] == kInf) {
        throw UnreachableDestination("node " + std::to_string(i) + " cannot reach commodity " + std::to_string(c));
      }
      bias.at(i, k) = dist[static_cast<std::size_t>(i)];
    }
  }
  return bias;
}

void write_bias_csv(std::ostream& os, const BiasMatrix& bias) {
  os << "node";
  for (NodeId c : bias.commodities()) os << ',' << c;
  os << '\n';
  for (NodeId i = 0; i < bias.node_count(); ++i) {
    os << i;
    for (int k = 0; k < bias.commodity_count(); ++k) os << ',' << bias.at(i, k);
    os << '\n';
  }
}

}  // namespace spbp
