#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "spbp/bias.hpp"
#include "spbp/topology.hpp"

namespace spbp {

class InfeasibleAssignment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using PacketId = std::int64_t;

struct PacketRecord {
  PacketId id = 0;
  NodeId commodity = 0;  // destination node
  NodeId src = 0;
  int flow = -1;
  int inject_slot = 0;
  int hops = 0;
  int deliver_slot = -1;  // -1 while in flight

  bool delivered() const noexcept { return deliver_slot >= 0; }
};

/// New packets of one commodity generated at one node during a slot.
struct ArrivalBatch {
  NodeId node = 0;
  int commodity = 0;  // commodity index
  int count = 0;
  int flow = -1;
};

/// Per-node, per-commodity FIFO queues plus the static bias. Queue lengths
/// are always the FIFO lengths.
class NetworkState {
 public:
  NetworkState(int node_count, BiasMatrix bias);

  int node_count() const noexcept { return nodes_; }
  int commodity_count() const noexcept { return bias_.commodity_count(); }
  std::span<const NodeId> commodities() const noexcept { return bias_.commodities(); }
  const BiasMatrix& bias() const noexcept { return bias_; }

  std::int64_t queue(NodeId i, int k) const {
    return static_cast<std::int64_t>(fifo_[index(i, k)].size());
  }
  const std::deque<PacketId>& fifo(NodeId i, int k) const { return fifo_[index(i, k)]; }

  /// Slot being processed; advanced by apply_transition.
  int slot() const noexcept { return slot_; }
  void set_slot(int t) noexcept { slot_ = t; }

  const std::vector<PacketRecord>& packets() const noexcept { return packets_; }
  std::int64_t injected() const noexcept { return static_cast<std::int64_t>(packets_.size()); }
  std::int64_t delivered() const noexcept { return delivered_; }
  std::int64_t in_flight() const noexcept { return injected() - delivered_; }

  /// Appends `batch.count` packets at the tail of (node, commodity),
  /// stamped with the current slot.
  void inject(const ArrivalBatch& batch);

  /// One synchronous slot update: departures drawn FIFO-head-first against
  /// slot-start queues, moved one hop, delivered on reaching their
  /// destination, then arrivals appended. `mu` is link-major (links x
  /// commodities). Throws InfeasibleAssignment if mu violates the per-link
  /// rate or per-commodity backlog bound.
  void apply_transition(const ConnectivityGraph& g, std::span<const std::int64_t> mu,
                        std::span<const double> realtime_rates, std::span<const ArrivalBatch> arrivals);

 private:
  std::size_t index(NodeId i, int k) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(commodity_count()) + static_cast<std::size_t>(k);
  }

  int nodes_;
  BiasMatrix bias_;
  std::vector<std::deque<PacketId>> fifo_;
  std::vector<PacketRecord> packets_;
  std::int64_t delivered_ = 0;
  int slot_ = 1;
  std::vector<std::pair<PacketId, NodeId>> moves_;  // scratch
};

/// Q_i^(c) + B_i^(c).
double biased_backlog(const NetworkState& s, NodeId i, int k);

/// Biased-backlog differential of commodity k across link l.
double backpressure(const NetworkState& s, const Link& l, int k);

/// Backpressure for every (link, commodity), link-major.
std::vector<double> backpressure_matrix(const NetworkState& s, const ConnectivityGraph& g);
void backpressure_matrix_into(const NetworkState& s, const ConnectivityGraph& g, std::vector<double>& out);

/// One CSV row "slot,Q(0,0),Q(0,1),..." (node-major). With header=true the
/// column names are written first.
void write_queue_row(std::ostream& os, const NetworkState& s, bool header);

}  // namespace spbp
