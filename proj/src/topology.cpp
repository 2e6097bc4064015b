#include "spbp/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <queue>
#include <random>

#include "spbp/rng.hpp"

namespace spbp {

ConnectivityGraph::ConnectivityGraph(std::vector<Point> positions,
                                     std::vector<std::pair<NodeId, NodeId>> directed_links,
                                     double comm_radius)
    : positions_(std::move(positions)), comm_radius_(comm_radius) {
  const int n = node_count();
  std::sort(directed_links.begin(), directed_links.end());
  directed_links.erase(std::unique(directed_links.begin(), directed_links.end()), directed_links.end());
  out_.resize(static_cast<std::size_t>(n));
  in_.resize(static_cast<std::size_t>(n));
  links_.reserve(directed_links.size());
  for (const auto& [s, d] : directed_links) {
    if (s < 0 || d < 0 || s >= n || d >= n || s == d) {
      throw std::invalid_argument("invalid link endpoint");
    }
    const auto id = static_cast<LinkId>(links_.size());
    links_.push_back({id, s, d});
    out_[static_cast<std::size_t>(s)].push_back(id);
    in_[static_cast<std::size_t>(d)].push_back(id);
  }
}

double ConnectivityGraph::distance(NodeId a, NodeId b) const {
  const auto& p = position(a);
  const auto& q = position(b);
  return std::hypot(p.x - q.x, p.y - q.y);
}

std::optional<LinkId> ConnectivityGraph::find_link(NodeId src, NodeId dst) const {
  for (LinkId e : out_links(src)) {
    if (links_[static_cast<std::size_t>(e)].dst == dst) return e;
  }
  return std::nullopt;
}

namespace {

int reach_count(const ConnectivityGraph& g, NodeId root, bool forward) {
  std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
  std::vector<NodeId> stack{root};
  seen[static_cast<std::size_t>(root)] = 1;
  int count = 1;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (LinkId e : forward ? g.out_links(u) : g.in_links(u)) {
      const NodeId v = forward ? g.link(e).dst : g.link(e).src;
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count;
}

}  // namespace

bool ConnectivityGraph::strongly_connected() const {
  if (node_count() == 0) return false;
  return reach_count(*this, 0, true) == node_count() && reach_count(*this, 0, false) == node_count();
}

bool ConnectivityGraph::closed_under_reversal() const {
  return std::all_of(links_.begin(), links_.end(),
                     [&](const Link& l) { return find_link(l.dst, l.src).has_value(); });
}

std::vector<int> ConnectivityGraph::hop_distances_to(NodeId dst) const {
  std::vector<int> hops(static_cast<std::size_t>(node_count()), -1);
  std::queue<NodeId> frontier;
  hops[static_cast<std::size_t>(dst)] = 0;
  frontier.push(dst);
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (LinkId e : in_links(v)) {
      const NodeId u = link(e).src;
      if (hops[static_cast<std::size_t>(u)] < 0) {
        hops[static_cast<std::size_t>(u)] = hops[static_cast<std::size_t>(v)] + 1;
        frontier.push(u);
      }
    }
  }
  return hops;
}

double effective_area_side(int n, const GenerationParams& params) {
  if (params.area_side > 0.0) return params.area_side;
  // Expected degree (ignoring boundary effects) = (n-1) * pi r^2 / side^2.
  const double r = params.comm_radius;
  return r * std::sqrt(std::numbers::pi * std::max(n - 1, 1) / params.target_degree);
}

namespace {

ConnectivityGraph disk_graph(const std::vector<Point>& pts, double radius) {
  std::vector<std::pair<NodeId, NodeId>> links;
  const int n = static_cast<int>(pts.size());
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      const double d = std::hypot(pts[static_cast<std::size_t>(a)].x - pts[static_cast<std::size_t>(b)].x,
                                  pts[static_cast<std::size_t>(a)].y - pts[static_cast<std::size_t>(b)].y);
      if (d <= radius) {
        links.emplace_back(a, b);
        links.emplace_back(b, a);
      }
    }
  }
  return ConnectivityGraph(pts, std::move(links), radius);
}

std::vector<Point> sample_points(int n, double side, std::uint64_t seed, int attempt) {
  std::mt19937_64 rng(derive_seed({seed, 0x706f696e74ULL, static_cast<std::uint64_t>(attempt)}));
  std::uniform_real_distribution<double> coord(0.0, side);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    p.x = coord(rng);
    p.y = coord(rng);
  }
  return pts;
}

}  // namespace

ConnectivityGraph generate_network(int n, std::uint64_t seed, const GenerationParams& params) {
  if (n < 2) throw std::invalid_argument("generate_network: need at least 2 nodes");
  const double side = effective_area_side(n, params);
  for (int attempt = 0; attempt <= params.max_resamples; ++attempt) {
    auto g = disk_graph(sample_points(n, side, seed, attempt), params.comm_radius);
    if (g.strongly_connected()) return g;
  }
  // Fallback: keep the last point set and grow the radius.
  const auto pts = sample_points(n, side, seed, params.max_resamples);
  double radius = params.comm_radius;
  for (int step = 0; step < params.max_radius_growth; ++step) {
    radius *= 1.1;
    auto g = disk_graph(pts, radius);
    if (g.strongly_connected()) return g;
  }
  throw GenerationFailure("generate_network: no strongly connected sample within retry budget");
}

LinkRates assign_link_rates(const ConnectivityGraph& g, std::uint64_t seed, const RateParams& params) {
  std::mt19937_64 rng(derive_seed({seed, 0x72617465ULL}));
  std::uniform_real_distribution<double> uni(params.min_rate, params.max_rate);
  LinkRates rates;
  rates.long_term.resize(static_cast<std::size_t>(g.link_count()));
  for (auto& r : rates.long_term) r = uni(rng);
  return rates;
}

void sample_realtime_rates_into(const LinkRates& rates, int t, std::uint64_t seed, const RateParams& params,
                                std::vector<double>& out) {
  constexpr int kMaxRejections = 64;
  out.resize(rates.long_term.size());
  for (std::size_t e = 0; e < rates.long_term.size(); ++e) {
    const double mean = rates.long_term[e];
    KeyedRng rng{seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(e)};
    std::normal_distribution<double> normal(mean, params.realtime_stddev);
    const double lo = mean - params.realtime_half_width;
    const double hi = mean + params.realtime_half_width;
    double v = normal(rng);
    for (int k = 0; k < kMaxRejections && (v < lo || v > hi); ++k) v = normal(rng);
    out[e] = std::max(0.0, std::clamp(v, lo, hi));
  }
}

std::vector<double> sample_realtime_rates(const LinkRates& rates, int t, std::uint64_t seed,
                                          const RateParams& params) {
  std::vector<double> out;
  sample_realtime_rates_into(rates, t, seed, params, out);
  return out;
}

TransceiverSpec TransceiverSpec::from_antennas(std::vector<int> antennas) {
  TransceiverSpec spec;
  spec.eta_tx.reserve(antennas.size());
  spec.eta_rx.reserve(antennas.size());
  for (int a : antennas) {
    if (a < 1) throw std::invalid_argument("antenna count must be >= 1");
    // SDMA: a streams each way. Single antenna: one reception, TDMA air time
    // budget of one slot for transmission.
    spec.eta_tx.push_back(static_cast<double>(a));
    spec.eta_rx.push_back(a);
  }
  spec.antennas = std::move(antennas);
  return spec;
}

TransceiverSpec TransceiverSpec::siso(int n) {
  return from_antennas(std::vector<int>(static_cast<std::size_t>(n), 1));
}

std::vector<int> sample_antennas(int n, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed({seed, 0x616e74ULL}));
  std::discrete_distribution<int> dist({0.2, 0.5, 0.2, 0.1});
  std::vector<int> out(static_cast<std::size_t>(n));
  for (auto& a : out) a = dist(rng) + 1;
  return out;
}

void write_edge_list(std::ostream& os, const ConnectivityGraph& g, const LinkRates& rates) {
  for (const auto& l : g.links()) {
    os << l.id << ' ' << l.src << ' ' << l.dst << ' ' << rates.long_term.at(static_cast<std::size_t>(l.id)) << '\n';
  }
}

}  // namespace spbp
