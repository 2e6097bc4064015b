#include "spbp/queueing.hpp"

#include <ostream>
#include <string>

namespace spbp {

NetworkState::NetworkState(int node_count, BiasMatrix bias)
    : nodes_(node_count),
      bias_(std::move(bias)),
      fifo_(static_cast<std::size_t>(node_count) * static_cast<std::size_t>(bias_.commodity_count())) {
  if (bias_.node_count() != node_count) throw std::invalid_argument("NetworkState: bias size mismatch");
}

void NetworkState::inject(const ArrivalBatch& batch) {
  if (batch.count < 0) throw std::invalid_argument("negative arrival count");
  const NodeId dest = commodities()[static_cast<std::size_t>(batch.commodity)];
  if (dest == batch.node) throw std::invalid_argument("arrival at its own destination");
  auto& q = fifo_[index(batch.node, batch.commodity)];
  for (int n = 0; n < batch.count; ++n) {
    const PacketId id = injected();
    packets_.push_back({id, dest, batch.node, batch.flow, slot_, 0, -1});
    q.push_back(id);
  }
}

void NetworkState::apply_transition(const ConnectivityGraph& g, std::span<const std::int64_t> mu,
                                    std::span<const double> realtime_rates, std::span<const ArrivalBatch> arrivals) {
  const auto C = static_cast<std::size_t>(commodity_count());
  const auto E = static_cast<std::size_t>(g.link_count());
  if (mu.size() != E * C) throw std::invalid_argument("apply_transition: mu has wrong shape");
  if (realtime_rates.size() != E) throw std::invalid_argument("apply_transition: one rate per link required");

  std::vector<std::int64_t> outgoing(fifo_.size(), 0);
  for (std::size_t e = 0; e < E; ++e) {
    const auto& l = g.link(static_cast<LinkId>(e));
    std::int64_t total = 0;
    for (std::size_t k = 0; k < C; ++k) {
      const auto m = mu[e * C + k];
      if (m < 0) throw InfeasibleAssignment("negative rate on link " + std::to_string(e));
      total += m;
      outgoing[index(l.src, static_cast<int>(k))] += m;
    }
    if (static_cast<double>(total) > realtime_rates[e] + 1e-9) {
      throw InfeasibleAssignment("slot " + std::to_string(slot_) + ": link " + std::to_string(e) +
                                 " carries " + std::to_string(total) + " packets above its real-time rate");
    }
  }
  for (std::size_t q = 0; q < fifo_.size(); ++q) {
    if (outgoing[q] > static_cast<std::int64_t>(fifo_[q].size())) {
      throw InfeasibleAssignment("slot " + std::to_string(slot_) + ": node " + std::to_string(q / C) +
                                 " commodity " + std::to_string(commodities()[q % C]) +
                                 " sends more packets than queued");
    }
  }

  moves_.clear();
  for (std::size_t e = 0; e < E; ++e) {
    const auto& l = g.link(static_cast<LinkId>(e));
    for (std::size_t k = 0; k < C; ++k) {
      auto& q = fifo_[index(l.src, static_cast<int>(k))];
      for (std::int64_t n = 0; n < mu[e * C + k]; ++n) {
        moves_.emplace_back(q.front(), l.dst);
        q.pop_front();
      }
    }
  }
  for (const auto& [id, to] : moves_) {
    auto& p = packets_[static_cast<std::size_t>(id)];
    ++p.hops;
    if (to == p.commodity) {
      p.deliver_slot = slot_;
      ++delivered_;
    } else {
      // Commodity index is recovered from the bias column order.
      for (std::size_t k = 0; k < C; ++k) {
        if (commodities()[k] == p.commodity) {
          fifo_[index(to, static_cast<int>(k))].push_back(id);
          break;
        }
      }
    }
  }
  for (const auto& a : arrivals) inject(a);
  ++slot_;
}

double biased_backlog(const NetworkState& s, NodeId i, int k) {
  return static_cast<double>(s.queue(i, k)) + s.bias().at(i, k);
}

double backpressure(const NetworkState& s, const Link& l, int k) {
  return biased_backlog(s, l.src, k) - biased_backlog(s, l.dst, k);
}

void backpressure_matrix_into(const NetworkState& s, const ConnectivityGraph& g, std::vector<double>& out) {
  const auto C = static_cast<std::size_t>(s.commodity_count());
  out.resize(static_cast<std::size_t>(g.link_count()) * C);
  for (const auto& l : g.links()) {
    for (std::size_t k = 0; k < C; ++k) {
      out[static_cast<std::size_t>(l.id) * C + k] = backpressure(s, l, static_cast<int>(k));
    }
  }
}

std::vector<double> backpressure_matrix(const NetworkState& s, const ConnectivityGraph& g) {
  std::vector<double> out;
  backpressure_matrix_into(s, g, out);
  return out;
}

void write_queue_row(std::ostream& os, const NetworkState& s, bool header) {
  if (header) {
    os << "slot";
    for (NodeId i = 0; i < s.node_count(); ++i) {
      for (NodeId c : s.commodities()) os << ",q_" << i << '_' << c;
    }
    os << '\n';
  }
  os << s.slot();
  for (NodeId i = 0; i < s.node_count(); ++i) {
    for (int k = 0; k < s.commodity_count(); ++k) os << ',' << s.queue(i, k);
  }
  os << '\n';
}

}  // namespace spbp
