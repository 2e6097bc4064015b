#include <sstream>
#include <string>

#include "spbp/queueing.hpp"
#include "spbp/scheduler.hpp"

namespace spbp {

namespace {
constexpr double kTol = 1e-9;
}

std::vector<std::string> feasibility_violations(const RateAssignment& ra, const ScheduleContext& ctx) {
  const auto& g = *ctx.graph;
  const auto& cs = *ctx.conflicts;
  const auto C = static_cast<std::size_t>(ra.commodity_count);
  std::vector<std::string> out;
  const auto report = [&](const auto&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    out.push_back(os.str());
  };

  std::vector<char> active(static_cast<std::size_t>(ra.link_count), 0);
  std::vector<std::int64_t> sent(ctx.queues.size(), 0);
  for (LinkId e = 0; e < ra.link_count; ++e) {
    const auto row = ra.mu_row(e);
    std::int64_t total = 0;
    for (std::size_t k = 0; k < C; ++k) {
      if (row[k] < 0) report("link ", e, " commodity ", k, ": negative rate ", row[k]);
      total += row[k];
      sent[static_cast<std::size_t>(g.link(e).src) * C + k] += row[k];
    }
    if (total <= 0) continue;
    active[static_cast<std::size_t>(e)] = 1;
    if (ra.x[static_cast<std::size_t>(e)] != Decision::scheduled) report("link ", e, ": carries packets but is not scheduled");
    if (static_cast<double>(total) > ctx.rates[static_cast<std::size_t>(e)] + kTol) {
      report("link ", e, ": ", total, " packets exceed rate ", ctx.rates[static_cast<std::size_t>(e)]);
    }
  }
  for (std::size_t q = 0; q < sent.size(); ++q) {
    if (sent[q] > ctx.queues[q]) report("node ", q / C, " commodity ", q % C, ": sends ", sent[q], " of ", ctx.queues[q]);
  }
  for (LinkId e = 0; e < ra.link_count; ++e) {
    if (!active[static_cast<std::size_t>(e)]) continue;
    for (LinkId f : cs.neighbors(e)) {
      if (f > e && active[static_cast<std::size_t>(f)]) report("links ", e, " and ", f, ": conflicting pair both active");
    }
  }
  for (const auto& h : cs.hyperedges()) {
    double load = 0.0;
    for (LinkId e : h.members) {
      if (!active[static_cast<std::size_t>(e)]) continue;
      if (h.kind == HyperedgeKind::rx) {
        load += 1.0;
      } else {
        load += tx_cost(static_cast<double>(ra.mu_sum(e)), ctx.rates[static_cast<std::size_t>(e)],
                        ctx.radios->antennas[static_cast<std::size_t>(h.owner)]);
      }
    }
    if (load > h.capacity + kTol) {
      report(h.kind == HyperedgeKind::tx ? "tx" : "rx", " hyperedge of node ", h.owner, ": load ", load,
             " exceeds capacity ", h.capacity);
    }
  }
  return out;
}

void check_feasibility(const RateAssignment& ra, const ScheduleContext& ctx) {
  const auto v = feasibility_violations(ra, ctx);
  if (v.empty()) return;
  std::string msg = "infeasible schedule:";
  for (const auto& s : v) msg += "\n  " + s;
  throw InfeasibleAssignment(msg);
}

}  // namespace spbp
