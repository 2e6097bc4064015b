#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "spbp/topology.hpp"

namespace spbp {

enum class BiasScheme {
  sp_rbar,              // every link weighs the network-wide mean rate
  sp_rbar_rmax_over_r,  // link e weighs mean_rate * max_rate / r_e
};

class UnreachableDestination : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> edge_weights(const LinkRates& rates, BiasScheme scheme);

/// Shortest-path distance from every node to every commodity (destination),
/// in packet units. Commodity index k refers to commodities()[k].
class BiasMatrix {
 public:
  BiasMatrix() = default;
  BiasMatrix(int node_count, std::vector<NodeId> commodities);

  int node_count() const noexcept { return nodes_; }
  int commodity_count() const noexcept { return static_cast<int>(commodities_.size()); }
  std::span<const NodeId> commodities() const noexcept { return commodities_; }

  double at(NodeId i, int k) const {
    return values_[static_cast<std::size_t>(i) * commodities_.size() + static_cast<std::size_t>(k)];
  }
  double& at(NodeId i, int k) {
    return values_[static_cast<std::size_t>(i) * commodities_.size() + static_cast<std::size_t>(k)];
  }

 private:
  int nodes_ = 0;
  std::vector<NodeId> commodities_;
  std::vector<double> values_;
};

/// Dijkstra towards each commodity on the reversed graph. Throws
/// UnreachableDestination if some node cannot reach some commodity.
BiasMatrix compute_bias(const ConnectivityGraph& g, std::span<const double> weights,
                        std::vector<NodeId> commodities);

/// Header "node,<c0>,<c1>,...", one row per node.
void write_bias_csv(std::ostream& os, const BiasMatrix& bias);

}  // namespace spbp
