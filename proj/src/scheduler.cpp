#include "spbp/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

#include "spbp/local_conflict.hpp"
#include "spbp/rng.hpp"

namespace spbp {

namespace {

constexpr double kCapacityEps = 1e-9;

bool beats(std::span<const double> w, LinkId a, LinkId b) {
  const double wa = w[static_cast<std::size_t>(a)];
  const double wb = w[static_cast<std::size_t>(b)];
  return wa > wb || (wa == wb && a < b);
}

void emit(const ScheduleContext& ctx, int iteration, LinkId e, std::string_view action, double weight) {
  if (ctx.trace && *ctx.trace) (*ctx.trace)({iteration, e, action, weight});
}

std::size_t idx(LinkId e) { return static_cast<std::size_t>(e); }

std::span<const std::int64_t> node_row(std::span<const std::int64_t> m, NodeId i, int C) {
  return m.subspan(static_cast<std::size_t>(i) * static_cast<std::size_t>(C), static_cast<std::size_t>(C));
}

std::span<const double> link_row(std::span<const double> m, LinkId e, int C) {
  return m.subspan(idx(e) * static_cast<std::size_t>(C), static_cast<std::size_t>(C));
}

void refresh_link(SchedulerState& state, RateAssignment& ra, const ScheduleContext& ctx, LinkId e) {
  const auto& l = ctx.graph->link(e);
  const int C = ra.commodity_count;
  if (!ctx.decouple) {
    ra.w[idx(e)] = allocate_link(ra.plans[idx(e)], link_row(ctx.backpressures, e, C),
                                 node_row(state.residual_queues, l.src, C), ra.gamma_row(e));
  }
  state.tau[idx(e)] = tx_cost(static_cast<double>(ra.gamma_sum(e)), ctx.rates[idx(e)],
                              ctx.radios->antennas[static_cast<std::size_t>(l.src)]);
}

void commit(SchedulerState& state, RateAssignment& ra, const ScheduleContext& ctx, LinkId e) {
  const auto& l = ctx.graph->link(e);
  const auto C = static_cast<std::size_t>(ra.commodity_count);
  ra.x[idx(e)] = Decision::scheduled;
  const auto g = ra.gamma_row(e);
  auto mu = ra.mu_row(e);
  for (std::size_t k = 0; k < C; ++k) {
    mu[k] = g[k];
    state.residual_queues[static_cast<std::size_t>(l.src) * C + k] -= g[k];
  }
  state.residual_eta_tx[static_cast<std::size_t>(l.src)] -= state.tau[idx(e)];
  --state.residual_eta_rx[static_cast<std::size_t>(l.dst)];
}

void validate(const RateAssignment& ra, const ScheduleContext& ctx) {
  if (!ctx.graph || !ctx.conflicts || !ctx.radios) throw std::invalid_argument("schedule: incomplete context");
  const auto E = static_cast<std::size_t>(ctx.graph->link_count());
  if (static_cast<std::size_t>(ra.link_count) != E || ctx.rates.size() != E ||
      ctx.backpressures.size() != E * static_cast<std::size_t>(ra.commodity_count) ||
      ctx.conflicts->link_count() != ra.link_count) {
    throw std::invalid_argument("schedule: shape mismatch");
  }
}

void mute_leftovers(RateAssignment& ra, const ScheduleContext& ctx, int iteration) {
  for (LinkId e = 0; e < ra.link_count; ++e) {
    if (ra.x[idx(e)] == Decision::undecided) {
      ra.x[idx(e)] = Decision::muted;
      emit(ctx, iteration, e, "mute", ra.w[idx(e)]);
    }
  }
}

std::vector<Decision> lgs_waves(std::span<const double> w, const ConflictStructure& cs, const ScheduleContext* ctx) {
  const auto E = static_cast<std::size_t>(cs.link_count());
  if (w.size() != E) throw std::invalid_argument("lgs_siso: one weight per link required");
  std::vector<Decision> x(E, Decision::undecided);
  for (LinkId e = 0; e < static_cast<LinkId>(E); ++e) {
    if (!(w[idx(e)] > 0.0)) {
      x[idx(e)] = Decision::muted;
      if (ctx) emit(*ctx, 0, e, "mute", w[idx(e)]);
    }
  }
  std::vector<LinkId> undecided;
  std::vector<LinkId> winners;
  for (int wave = 1;; ++wave) {
    undecided.clear();
    for (LinkId e = 0; e < static_cast<LinkId>(E); ++e) {
      if (x[idx(e)] == Decision::undecided) undecided.push_back(e);
    }
    if (undecided.empty()) break;
    winners.clear();
    for (LinkId e : undecided) {
      const auto nb = cs.neighbors(e);
      const bool top = std::none_of(nb.begin(), nb.end(), [&](LinkId f) {
        return x[idx(f)] == Decision::undecided && beats(w, f, e);
      });
      if (top) winners.push_back(e);
    }
    for (LinkId e : winners) {
      x[idx(e)] = Decision::scheduled;
      if (ctx) emit(*ctx, wave, e, "schedule", w[idx(e)]);
      for (LinkId f : cs.neighbors(e)) {
        if (x[idx(f)] == Decision::undecided) {
          x[idx(f)] = Decision::muted;
          if (ctx) emit(*ctx, wave, f, "mute", w[idx(f)]);
        }
      }
    }
  }
  return x;
}

}  // namespace

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::lgs: return "lgs";
    case SchedulerKind::lgs_ach: return "lgs-ach";
    case SchedulerKind::lgs_mimo: return "lgs-mimo";
  }
  return "lgs";
}

SchedulerKind parse_scheduler(std::string_view name) {
  if (name == "lgs") return SchedulerKind::lgs;
  if (name == "lgs-ach") return SchedulerKind::lgs_ach;
  if (name == "lgs-mimo") return SchedulerKind::lgs_mimo;
  throw std::invalid_argument("unknown scheduler '" + std::string(name) + "'");
}

std::vector<std::vector<NodeId>> nearby_devices(const ConnectivityGraph& g, const ConflictStructure& cs) {
  const auto N = static_cast<std::size_t>(g.node_count());
  std::vector<std::vector<NodeId>> out(N);
  const auto touch = [&](NodeId i, LinkId f) {
    out[static_cast<std::size_t>(i)].push_back(g.link(f).src);
    out[static_cast<std::size_t>(i)].push_back(g.link(f).dst);
  };
  for (NodeId i = 0; i < static_cast<NodeId>(N); ++i) {
    for (auto links : {g.out_links(i), g.in_links(i)}) {
      for (LinkId e : links) {
        touch(i, e);
        for (LinkId f : cs.neighbors(e)) touch(i, f);
      }
    }
    auto& v = out[static_cast<std::size_t>(i)];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    v.erase(std::remove(v.begin(), v.end(), i), v.end());
  }
  return out;
}

SchedulerState::SchedulerState(const ScheduleContext& ctx)
    : residual_queues(ctx.queues.begin(), ctx.queues.end()),
      residual_eta_tx(ctx.radios->eta_tx),
      residual_eta_rx(ctx.radios->eta_rx),
      tau(static_cast<std::size_t>(ctx.graph->link_count()), 1.0) {}

void rate_reassign(SchedulerState& state, RateAssignment& ra, const ScheduleContext& ctx) {
  for (LinkId e = 0; e < ra.link_count; ++e) {
    if (ra.x[idx(e)] == Decision::undecided) refresh_link(state, ra, ctx, e);
  }
}

std::vector<Decision> lgs_siso(std::span<const double> weights, const ConflictStructure& cs) {
  return lgs_waves(weights, cs, nullptr);
}

void schedule_lgs(RateAssignment& ra, const ScheduleContext& ctx) {
  validate(ra, ctx);
  ra.x = lgs_waves(ra.w, *ctx.conflicts, &ctx);
  std::fill(ra.mu.begin(), ra.mu.end(), 0);
  for (LinkId e = 0; e < ra.link_count; ++e) {
    if (ra.x[idx(e)] != Decision::scheduled) continue;
    const auto g = ra.gamma_row(e);
    std::copy(g.begin(), g.end(), ra.mu_row(e).begin());
  }
}

void schedule_lgs_ach(RateAssignment& ra, const ScheduleContext& ctx) {
  validate(ra, ctx);
  const auto& g = *ctx.graph;
  const auto& cs = *ctx.conflicts;
  SchedulerState state(ctx);
  std::fill(ra.x.begin(), ra.x.end(), Decision::undecided);
  std::fill(ra.mu.begin(), ra.mu.end(), 0);

  std::vector<LinkId> undecided;
  std::vector<LinkId> winners;
  int k = 1;
  for (; k <= ctx.max_iterations; ++k) {
    rate_reassign(state, ra, ctx);
    undecided.clear();
    for (LinkId e = 0; e < ra.link_count; ++e) {
      if (ra.x[idx(e)] != Decision::undecided) continue;
      const auto& l = g.link(e);
      const bool infeasible = !(ra.w[idx(e)] > 0.0) ||
                              state.tau[idx(e)] > state.residual_eta_tx[static_cast<std::size_t>(l.src)] + kCapacityEps ||
                              state.residual_eta_rx[static_cast<std::size_t>(l.dst)] <= 0;
      if (infeasible) {
        ra.x[idx(e)] = Decision::muted;
        emit(ctx, k, e, "mute", ra.w[idx(e)]);
      } else {
        undecided.push_back(e);
      }
    }
    if (undecided.empty()) break;

    const auto open = [&](LinkId f) { return ra.x[idx(f)] == Decision::undecided; };
    winners.clear();
    for (LinkId e : undecided) {
      const auto& l = g.link(e);
      const auto tx = g.out_links(l.src);
      if (std::any_of(tx.begin(), tx.end(), [&](LinkId f) { return f != e && open(f) && beats(ra.w, f, e); })) {
        continue;
      }
      const auto nb = cs.neighbors(e);
      if (std::any_of(nb.begin(), nb.end(), [&](LinkId f) { return open(f) && beats(ra.w, f, e); })) continue;
      const auto rx = g.in_links(l.dst);
      const auto ahead = std::count_if(rx.begin(), rx.end(),
                                       [&](LinkId f) { return f != e && open(f) && beats(ra.w, f, e); });
      if (ahead >= state.residual_eta_rx[static_cast<std::size_t>(l.dst)]) continue;
      winners.push_back(e);
    }
    for (LinkId e : winners) {
      commit(state, ra, ctx, e);
      emit(ctx, k, e, "schedule", ra.w[idx(e)]);
      for (LinkId f : cs.neighbors(e)) {
        if (open(f)) {
          ra.x[idx(f)] = Decision::muted;
          emit(ctx, k, f, "mute", ra.w[idx(f)]);
        }
      }
    }
  }
  mute_leftovers(ra, ctx, std::min(k, ctx.max_iterations));
}

void schedule_lgs_mimo(RateAssignment& ra, const ScheduleContext& ctx) {
  validate(ra, ctx);
  const auto& g = *ctx.graph;
  const auto& cs = *ctx.conflicts;
  const auto N = static_cast<std::size_t>(g.node_count());
  const auto E = static_cast<std::size_t>(g.link_count());
  std::vector<std::vector<NodeId>> local_nearby;
  if (!ctx.nearby) local_nearby = nearby_devices(g, cs);
  const auto& nearby = ctx.nearby ? *ctx.nearby : local_nearby;

  SchedulerState state(ctx);
  std::fill(ra.x.begin(), ra.x.end(), Decision::undecided);
  std::fill(ra.mu.begin(), ra.mu.end(), 0);

  std::vector<char> v_tx(N, 1);
  std::vector<char> v_rx(N, 1);
  // rejected[i][e]: device i has rejected link e during this slot.
  std::vector<std::vector<char>> rejected(N, std::vector<char>(E, 0));
  std::vector<LinkId> candidate(N, -1);
  std::vector<char> granted(E, 0);
  std::vector<RtsMessage> heard;
  std::vector<LinkId> incoming;
  std::vector<LinkId> requests;

  const auto open = [&](LinkId f) { return ra.x[idx(f)] == Decision::undecided; };
  const auto mute = [&](int k, LinkId e, std::string_view action) {
    ra.x[idx(e)] = Decision::muted;
    emit(ctx, k, e, action, ra.w[idx(e)]);
  };
  const auto is_active = [&](std::size_t i) { return v_tx[i] || v_rx[i]; };

  int k = 1;
  for (; k <= ctx.max_iterations; ++k) {
    if (std::none_of(v_tx.begin(), v_tx.end(), [](char c) { return c; }) &&
        std::none_of(v_rx.begin(), v_rx.end(), [](char c) { return c; })) {
      break;
    }

    // Candidate selection and RTS.
    for (std::size_t i = 0; i < N; ++i) {
      candidate[i] = -1;
      if (!v_tx[i]) continue;
      for (LinkId e : g.out_links(static_cast<NodeId>(i))) {
        if (!open(e)) continue;
        refresh_link(state, ra, ctx, e);
        if (!(ra.w[idx(e)] > 0.0) || state.tau[idx(e)] > state.residual_eta_tx[i] + kCapacityEps) {
          mute(k, e, "mute");
          continue;
        }
        if (candidate[i] < 0 || beats(ra.w, e, candidate[i])) candidate[i] = e;
      }
      if (candidate[i] < 0) v_tx[i] = 0;
    }

    // Receivers build their local conflict graphs and answer with CTS.
    std::fill(granted.begin(), granted.end(), 0);
    for (std::size_t i = 0; i < N; ++i) {
      const auto node = static_cast<NodeId>(i);
      auto& phi = rejected[i];
      heard.clear();
      for (NodeId j : nearby[i]) {
        const LinkId c = candidate[static_cast<std::size_t>(j)];
        if (c >= 0) heard.push_back({c, ra.w[idx(c)]});
      }

      // Requests that would collide with a link already committed here.
      // Idle devices keep guarding their committed links.
      const auto guard = [&](LinkId r) {
        for (auto links : {g.out_links(node), g.in_links(node)}) {
          for (LinkId s : links) {
            if (ra.x[idx(s)] == Decision::scheduled && cs.conflicts(r, s)) {
              phi[idx(r)] = 1;
              return;
            }
          }
        }
      };
      for (const auto& rts : heard) guard(rts.link);
      if (candidate[i] >= 0) guard(candidate[i]);
      if (!is_active(i)) continue;

      incoming.clear();
      for (LinkId e : g.in_links(node)) {
        if (open(e)) incoming.push_back(e);
      }
      const LinkId own = candidate[i];
      std::optional<RtsMessage> own_rts;
      if (own >= 0) own_rts = RtsMessage{own, ra.w[idx(own)]};
      const auto lcg = build_local_conflict_graph(node, own_rts, incoming, heard, g, cs);
      const auto set = greedy_mwis_local(lcg);
      const auto in_set = [&](LinkId e) { return std::binary_search(set.begin(), set.end(), e); };

      if (v_rx[i] && state.residual_eta_rx[i] > 0 && !(own >= 0 && in_set(own))) {
        requests.clear();
        for (LinkId e : set) {
          if (g.link(e).dst == node) requests.push_back(e);
        }
        std::sort(requests.begin(), requests.end(), [&](LinkId a, LinkId b) { return beats(ra.w, a, b); });
        const auto take = std::min(requests.size(), static_cast<std::size_t>(state.residual_eta_rx[i]));
        for (std::size_t n = 0; n < take; ++n) {
          const LinkId e = requests[n];
          granted[idx(e)] = 1;
          emit(ctx, k, e, "grant", ra.w[idx(e)]);
          for (LinkId f : lcg.neighbors(e)) phi[idx(f)] = 1;
        }
        state.residual_eta_rx[i] -= static_cast<int>(take);
        // A device that grants a request turns receiver and drops its own candidate.
        if (take > 0 && own >= 0 && open(own)) mute(k, own, "mute");
      }

      const bool waiting = std::any_of(incoming.begin(), incoming.end(), [&](LinkId e) { return !granted[idx(e)]; });
      if (state.residual_eta_rx[i] <= 0 || !waiting) {
        v_rx[i] = 0;
        for (LinkId e : incoming) {
          if (!granted[idx(e)]) phi[idx(e)] = 1;
        }
      }
    }

    // Transmitters commit granted, unrejected requests.
    for (std::size_t i = 0; i < N; ++i) {
      const LinkId e = candidate[i];
      if (e < 0 || !open(e)) continue;
      bool refused = rejected[i][idx(e)] != 0;
      for (NodeId j : nearby[i]) refused = refused || rejected[static_cast<std::size_t>(j)][idx(e)] != 0;
      if (refused) {
        mute(k, e, "reject");
      } else if (granted[idx(e)]) {
        commit(state, ra, ctx, e);
        emit(ctx, k, e, "schedule", ra.w[idx(e)]);
        for (LinkId f : g.in_links(static_cast<NodeId>(i))) {
          if (open(f)) rejected[i][idx(f)] = 1;
        }
      }
    }

    // Hidden-node protection: adopt rejections of incoming links seen nearby.
    for (std::size_t i = 0; i < N; ++i) {
      for (LinkId f : g.in_links(static_cast<NodeId>(i))) {
        if (!open(f) || rejected[i][idx(f)]) continue;
        for (NodeId j : nearby[i]) {
          if (rejected[static_cast<std::size_t>(j)][idx(f)]) {
            rejected[i][idx(f)] = 1;
            break;
          }
        }
      }
    }
  }
  mute_leftovers(ra, ctx, std::min(k, ctx.max_iterations));
}

void schedule(SchedulerKind kind, RateAssignment& ra, const ScheduleContext& ctx) {
  switch (kind) {
    case SchedulerKind::lgs: schedule_lgs(ra, ctx); return;
    case SchedulerKind::lgs_ach: schedule_lgs_ach(ra, ctx); return;
    case SchedulerKind::lgs_mimo: schedule_lgs_mimo(ra, ctx); return;
  }
}

void resolve_duplicate_claims(RateAssignment& ra, const ConnectivityGraph& g, std::span<const std::int64_t> queues,
                              std::uint64_t seed) {
  const auto C = static_cast<std::size_t>(ra.commodity_count);
  std::vector<LinkId> links;
  std::vector<std::int64_t> room;
  std::vector<std::int64_t> counts;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    for (std::size_t k = 0; k < C; ++k) {
      links.clear();
      room.clear();
      std::int64_t claimed = 0;
      for (LinkId e : g.out_links(i)) {
        const auto m = ra.mu_row(e)[k];
        if (m <= 0) continue;
        links.push_back(e);
        room.push_back(m);
        claimed += m;
      }
      const auto queued = queues[static_cast<std::size_t>(i) * C + k];
      if (claimed <= queued) continue;
      KeyedRng rng{seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k)};
      counts.assign(links.size(), 0);
      for (std::int64_t p = 0; p < queued; ++p) {
        std::uint64_t open_links = 0;
        for (auto r : room) open_links += r > 0 ? 1 : 0;
        auto pick = rng() % open_links;
        for (std::size_t n = 0; n < links.size(); ++n) {
          if (room[n] <= 0) continue;
          if (pick-- == 0) {
            --room[n];
            ++counts[n];
            break;
          }
        }
      }
      for (std::size_t n = 0; n < links.size(); ++n) ra.mu_row(links[n])[k] = counts[n];
    }
  }
}

}  // namespace spbp
