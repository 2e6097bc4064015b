#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace spbp {

using NodeId = int;
using LinkId = int;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Link {
  LinkId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
};

class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Directed wireless connectivity graph. Link ids are dense, 0..link_count-1,
/// ordered by (src, dst); that order is the global tie-break order.
class ConnectivityGraph {
 public:
  ConnectivityGraph() = default;
  ConnectivityGraph(std::vector<Point> positions,
                    std::vector<std::pair<NodeId, NodeId>> directed_links,
                    double comm_radius);

  int node_count() const noexcept { return static_cast<int>(positions_.size()); }
  int link_count() const noexcept { return static_cast<int>(links_.size()); }

  std::span<const Link> links() const noexcept { return links_; }
  const Link& link(LinkId e) const { return links_.at(static_cast<std::size_t>(e)); }

  /// Outgoing links of `i`, ascending id.
  std::span<const LinkId> out_links(NodeId i) const { return out_.at(static_cast<std::size_t>(i)); }
  /// Incoming links of `i`, ascending id.
  std::span<const LinkId> in_links(NodeId i) const { return in_.at(static_cast<std::size_t>(i)); }

  const Point& position(NodeId i) const { return positions_.at(static_cast<std::size_t>(i)); }
  double distance(NodeId a, NodeId b) const;
  double comm_radius() const noexcept { return comm_radius_; }

  std::optional<LinkId> find_link(NodeId src, NodeId dst) const;

  bool strongly_connected() const;
  bool closed_under_reversal() const;

  /// Unweighted hop counts from every node to `dst` (-1 if unreachable).
  std::vector<int> hop_distances_to(NodeId dst) const;

 private:
  std::vector<Point> positions_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<std::vector<LinkId>> in_;
  double comm_radius_ = 0.0;
};

struct GenerationParams {
  double comm_radius = 1.0;
  // Side of the square deployment area. Zero means "derive from
  // target_degree" so the expected node degree is roughly target_degree.
  double area_side = 0.0;
  double target_degree = 6.0;
  int max_resamples = 20;
  int max_radius_growth = 10;  // fallback steps of +10% comm_radius
};

double effective_area_side(int n, const GenerationParams& params);

/// Uniform points in a square, bidirectional links within comm_radius.
/// Resamples with per-attempt derived seeds, then grows the radius, until the graph
/// is strongly connected. Throws GenerationFailure when the budget runs out.
ConnectivityGraph generate_network(int n, std::uint64_t seed, const GenerationParams& params = {});

/// Long-term and per-slot link rates in packets/slot.
struct LinkRates {
  std::vector<double> long_term;
};

struct RateParams {
  double min_rate = 10.0;
  double max_rate = 42.0;
  double realtime_stddev = 3.0;
  double realtime_half_width = 9.0;
};

LinkRates assign_link_rates(const ConnectivityGraph& g, std::uint64_t seed, const RateParams& params = {});

/// Truncated-normal real-time rates for slot t; a pure function of
/// (seed, t, link id).
std::vector<double> sample_realtime_rates(const LinkRates& rates, int t, std::uint64_t seed,
                                          const RateParams& params = {});
void sample_realtime_rates_into(const LinkRates& rates, int t, std::uint64_t seed,
                                const RateParams& params, std::vector<double>& out);

/// Per-node transceiver capabilities: antennas plus derived stream capacities.
struct TransceiverSpec {
  std::vector<int> antennas;
  std::vector<double> eta_tx;
  std::vector<int> eta_rx;

  static TransceiverSpec from_antennas(std::vector<int> antennas);
  static TransceiverSpec siso(int n);

  int node_count() const noexcept { return static_cast<int>(antennas.size()); }
};

/// Antenna counts drawn from P(1)=0.2, P(2)=0.5, P(3)=0.2, P(4)=0.1.
std::vector<int> sample_antennas(int n, std::uint64_t seed);

/// "link_id src dst r_e" per line.
void write_edge_list(std::ostream& os, const ConnectivityGraph& g, const LinkRates& rates);

}  // namespace spbp
