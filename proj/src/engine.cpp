#include "spbp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "spbp/rng.hpp"

namespace spbp {

namespace {

constexpr std::uint64_t kFlowStream = 0x666c6f77ULL;
constexpr std::uint64_t kArrivalStream = 0x61727276ULL;
constexpr std::uint64_t kResolveStream = 0x7265736fULL;

void write_event(std::ostream& os, int slot, const DecisionEvent& ev) {
  os << "{\"slot\":" << slot << ",\"iteration\":" << ev.iteration << ",\"link\":" << ev.link << ",\"action\":\""
     << ev.action << "\",\"weight\":" << ev.weight << "}\n";
}

}  // namespace

std::string_view to_string(TrafficKind kind) { return kind == TrafficKind::bursty ? "bursty" : "streaming"; }

std::vector<FlowSpec> generate_flows(const ConnectivityGraph& g, std::uint64_t seed, int T,
                                     const TrafficParams& params) {
  const int n = g.node_count();
  if (n < 2) return {};
  const auto wanted = static_cast<std::size_t>(std::floor(params.flow_fraction * n + 1e-9));
  const auto max_pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
  if (wanted > max_pairs) throw std::invalid_argument("generate_flows: more flows than node pairs");

  std::mt19937_64 rng(derive_seed({seed, kFlowStream}));
  std::uniform_int_distribution<int> node(0, n - 1);
  std::uniform_real_distribution<double> rate(params.lambda_min, params.lambda_max);
  std::bernoulli_distribution streaming(std::clamp(params.mix, 0.0, 1.0));
  std::uniform_int_distribution<int> start(0, std::max(T - params.burst_margin, 0));

  std::set<std::pair<NodeId, NodeId>> used;
  std::vector<FlowSpec> flows;
  while (flows.size() < wanted) {
    const NodeId src = node(rng);
    const NodeId dst = node(rng);
    if (src == dst || !used.emplace(src, dst).second) continue;
    FlowSpec f;
    f.src = src;
    f.dst = dst;
    f.rate = rate(rng);
    if (params.lambda) f.rate = *params.lambda;
    if (streaming(rng)) {
      f.kind = TrafficKind::streaming;
    } else {
      f.kind = TrafficKind::bursty;
      f.start_slot = start(rng);
      f.duration = params.burst_duration;
    }
    flows.push_back(f);
  }
  return flows;
}

bool flow_active(const FlowSpec& f, int t) {
  if (f.kind == TrafficKind::streaming) return true;
  return t >= f.start_slot && t < f.start_slot + f.duration;
}

std::vector<int> flow_arrivals(const std::vector<FlowSpec>& flows, int t, std::uint64_t seed) {
  std::vector<int> out(flows.size(), 0);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    if (!flow_active(flows[f], t) || !(flows[f].rate > 0.0)) continue;
    KeyedRng rng{seed, kArrivalStream, static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(t)};
    std::poisson_distribution<int> poisson(flows[f].rate);
    out[f] = poisson(rng);
  }
  return out;
}

std::vector<NodeId> flow_commodities(const std::vector<FlowSpec>& flows) {
  std::vector<NodeId> out;
  for (const auto& f : flows) out.push_back(f.dst);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<FlowMetrics> flow_metrics(const std::vector<PacketRecord>& packets, std::size_t flow_count, int T) {
  std::vector<FlowMetrics> m(flow_count);
  std::vector<double> latency(flow_count, 0.0);
  std::vector<double> hops(flow_count, 0.0);
  for (const auto& p : packets) {
    if (p.flow < 0 || static_cast<std::size_t>(p.flow) >= flow_count) continue;
    const auto f = static_cast<std::size_t>(p.flow);
    ++m[f].injected;
    if (!p.delivered()) continue;
    ++m[f].delivered;
    latency[f] += p.deliver_slot - p.inject_slot;
    hops[f] += p.hops;
  }
  for (std::size_t f = 0; f < flow_count; ++f) {
    auto& x = m[f];
    x.throughput = T > 0 ? static_cast<double>(x.delivered) / T : 0.0;
    if (x.delivered > 0) {
      x.mean_latency = latency[f] / static_cast<double>(x.delivered);
      x.trip_length = hops[f] / static_cast<double>(x.delivered);
    }
    if (x.injected > 0) {
      x.delivery_ratio = static_cast<double>(x.delivered) / static_cast<double>(x.injected);
      x.composite_latency = x.mean_latency * x.delivery_ratio + T * (1.0 - x.delivery_ratio);
    }
  }
  return m;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<ClassAggregate> aggregate_flows(const std::vector<FlowSpec>& flows, const std::vector<FlowMetrics>& metrics) {
  if (flows.size() != metrics.size()) throw std::invalid_argument("aggregate_flows: size mismatch");
  const auto summarize = [](const std::vector<double>& v) {
    MetricSummary s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    s.p95 = percentile(v, 95.0);
    return s;
  };
  std::vector<ClassAggregate> out;
  for (std::string_view cls : {"all", "streaming", "bursty"}) {
    std::vector<double> thr, lat, dr, trip, comp;
    int count = 0;
    for (std::size_t f = 0; f < flows.size(); ++f) {
      if (cls != "all" && to_string(flows[f].kind) != cls) continue;
      const auto& m = metrics[f];
      if (m.injected == 0) continue;
      ++count;
      thr.push_back(m.throughput);
      dr.push_back(m.delivery_ratio);
      comp.push_back(m.composite_latency);
      if (m.delivered > 0) {
        lat.push_back(m.mean_latency);
        trip.push_back(m.trip_length);
      }
    }
    ClassAggregate a;
    a.traffic = std::string(cls);
    a.flows = count;
    a.throughput = summarize(thr);
    a.mean_latency = summarize(lat);
    a.delivery_ratio = summarize(dr);
    a.trip_length = summarize(trip);
    a.composite_latency = summarize(comp);
    out.push_back(std::move(a));
  }
  return out;
}

AntennaMode parse_antenna_mode(std::string_view text) {
  AntennaMode m;
  if (text == "siso") {
    m.kind = AntennaMode::Kind::siso;
  } else if (text == "distribution") {
    m.kind = AntennaMode::Kind::distribution;
  } else if (text.rfind("mimo", 0) == 0) {
    // "mimo" or "mimo:<count>"
    m.kind = AntennaMode::Kind::fixed;
    m.count = 2;
    if (text.size() > 4) {
      if (text[4] != ':') throw std::invalid_argument("bad antenna mode '" + std::string(text) + "'");
      const std::string digits(text.substr(5));
      std::size_t used = 0;
      int c = 0;
      try {
        c = std::stoi(digits, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != digits.size() || c < 1) {
        throw std::invalid_argument("bad antenna count in '" + std::string(text) + "'");
      }
      m.count = c;
    }
  } else {
    throw std::invalid_argument("unknown antenna mode '" + std::string(text) + "'");
  }
  return m;
}

std::string to_string(const AntennaMode& mode) {
  switch (mode.kind) {
    case AntennaMode::Kind::siso: return "siso";
    case AntennaMode::Kind::distribution: return "distribution";
    case AntennaMode::Kind::fixed: return "mimo:" + std::to_string(mode.count);
  }
  return "distribution";
}

std::string_view to_string(CommoditySelection s) { return s == CommoditySelection::maxu ? "maxu" : "exclusive"; }

CommoditySelection parse_selection(std::string_view text) {
  if (text == "maxu") return CommoditySelection::maxu;
  if (text == "exclusive" || text == "excl") return CommoditySelection::exclusive;
  throw std::invalid_argument("unknown commodity selection '" + std::string(text) + "'");
}

std::string_view to_string(BiasScheme b) { return b == BiasScheme::sp_rbar ? "sp_rbar" : "sp_rbar_rmax_over_r"; }

BiasScheme parse_bias(std::string_view text) {
  if (text == "sp_rbar") return BiasScheme::sp_rbar;
  if (text == "sp_rbar_rmax_over_r") return BiasScheme::sp_rbar_rmax_over_r;
  throw std::invalid_argument("unknown bias scheme '" + std::string(text) + "'");
}

Scenario make_scenario(const ScenarioSpec& spec) {
  if (spec.T < 1) throw std::invalid_argument("horizon must be at least one slot");
  Scenario sc;
  sc.spec = spec;
  sc.graph = generate_network(spec.nodes, spec.instance_seed, spec.generation);
  sc.sampled_antennas = sample_antennas(spec.nodes, spec.instance_seed);
  sc.rates = assign_link_rates(sc.graph, spec.realization_seed, spec.rates);
  sc.flows = generate_flows(sc.graph, spec.realization_seed, spec.T, spec.traffic);
  return sc;
}

SlotFailure::SlotFailure(int slot, std::string trace_path, const std::string& what)
    : InfeasibleAssignment(what), slot_(slot), trace_path_(std::move(trace_path)) {}

TransceiverSpec radios_for(const Scenario& scenario, const Variant& variant) {
  const auto mode = variant.antennas.value_or(scenario.spec.radio.antennas);
  const int n = scenario.graph.node_count();
  if (variant.scheduler == SchedulerKind::lgs) return TransceiverSpec::siso(n);
  switch (mode.kind) {
    case AntennaMode::Kind::siso: return TransceiverSpec::siso(n);
    case AntennaMode::Kind::fixed:
      return TransceiverSpec::from_antennas(std::vector<int>(static_cast<std::size_t>(n), mode.count));
    case AntennaMode::Kind::distribution: break;
  }
  return TransceiverSpec::from_antennas(scenario.sampled_antennas);
}

RunResult run(const Scenario& sc, const Variant& variant, const RunOptions& opt) {
  const auto& g = sc.graph;
  const auto& spec = sc.spec;
  const int n = g.node_count();
  const bool siso_graph = variant.scheduler == SchedulerKind::lgs;
  const TransceiverSpec radios = radios_for(sc, variant);
  const ConflictStructure cs =
      siso_graph ? build_siso_conflict_graph(g, spec.radio.interference_range)
                 : build_ach(g, radios, AchOptions{spec.radio.interference_range, spec.radio.nullification});
  std::vector<std::vector<NodeId>> nearby;
  if (variant.scheduler == SchedulerKind::lgs_mimo) nearby = nearby_devices(g, cs);

  const auto commodities = flow_commodities(sc.flows);
  const auto weights = edge_weights(sc.rates, variant.bias);
  NetworkState state(n, compute_bias(g, weights, commodities));
  std::vector<int> flow_commodity;
  for (const auto& f : sc.flows) {
    flow_commodity.push_back(
        static_cast<int>(std::lower_bound(commodities.begin(), commodities.end(), f.dst) - commodities.begin()));
  }

  const std::uint64_t seed = spec.realization_seed;
  const auto other = variant.selection == CommoditySelection::maxu ? CommoditySelection::exclusive
                                                                   : CommoditySelection::maxu;
  RunResult result;
  std::vector<double> realtime;
  std::vector<double> bp;
  std::vector<ArrivalBatch> batches;

  for (int t = 1; t <= spec.T; ++t) {
    sample_realtime_rates_into(sc.rates, t, seed, spec.rates, realtime);
    backpressure_matrix_into(state, g, bp);
    const auto queues = queue_matrix(state);

    ScheduleContext ctx;
    ctx.graph = &g;
    ctx.conflicts = &cs;
    ctx.radios = &radios;
    ctx.rates = realtime;
    ctx.backpressures = bp;
    ctx.queues = queues;
    ctx.max_iterations = spec.max_iterations;
    ctx.decouple = variant.decouple;
    ctx.nearby = nearby.empty() ? nullptr : &nearby;
    DecisionTrace tracer;
    if (opt.trace) {
      tracer = [&](const DecisionEvent& ev) { write_event(*opt.trace, t, ev); };
      ctx.trace = &tracer;
    }

    const auto plan_slot = [&](const ScheduleContext& c) {
      auto ra = assign_rates(variant.selection, state, g, realtime, bp);
      schedule(variant.scheduler, ra, c);
      if (variant.decouple) resolve_duplicate_claims(ra, g, queues, derive_seed({seed, kResolveStream,
                                                                                 static_cast<std::uint64_t>(t)}));
      return ra;
    };

    if (opt.check_dominance) {
      const auto base = assign_rates(variant.selection, state, g, realtime, bp);
      const auto alt = assign_rates(other, state, g, realtime, bp);
      const auto& mx = variant.selection == CommoditySelection::maxu ? base : alt;
      const auto& ex = variant.selection == CommoditySelection::maxu ? alt : base;
      for (std::size_t e = 0; e < mx.w.size(); ++e) {
        ++result.dominance_checks;
        if (mx.w[e] < ex.w[e] - 1e-9) ++result.dominance_violations;
      }
    }

    auto ra = plan_slot(ctx);
    if (opt.check_feasibility) {
      const auto violations = feasibility_violations(ra, ctx);
      if (!violations.empty()) {
        std::string msg = "slot " + std::to_string(t) + ": infeasible schedule";
        for (const auto& v : violations) msg += "\n  " + v;
        if (!opt.failure_trace_path.empty()) {
          std::ofstream out(opt.failure_trace_path);
          for (const auto& v : violations) out << "{\"slot\":" << t << ",\"violation\":\"" << v << "\"}\n";
          DecisionTrace to_file = [&](const DecisionEvent& ev) { write_event(out, t, ev); };
          ScheduleContext again = ctx;
          again.trace = &to_file;
          plan_slot(again);
        }
        throw SlotFailure(t, opt.failure_trace_path, msg);
      }
    }

    const auto counts = flow_arrivals(sc.flows, t, seed);
    batches.clear();
    for (std::size_t f = 0; f < sc.flows.size(); ++f) {
      if (counts[f] > 0) batches.push_back({sc.flows[f].src, flow_commodity[f], counts[f], static_cast<int>(f)});
    }
    state.apply_transition(g, ra.mu, realtime, batches);
    if (opt.queue_dump) write_queue_row(*opt.queue_dump, state, t == 1);
  }

  result.flows = flow_metrics(state.packets(), sc.flows.size(), spec.T);
  result.aggregates = aggregate_flows(sc.flows, result.flows);
  result.injected = state.injected();
  result.delivered = state.delivered();
  double latency = 0.0;
  double hops = 0.0;
  for (const auto& p : state.packets()) {
    if (!p.delivered()) continue;
    latency += p.deliver_slot - p.inject_slot;
    hops += p.hops;
  }
  if (result.delivered > 0) {
    result.mean_packet_latency = latency / static_cast<double>(result.delivered);
    result.mean_packet_hops = hops / static_cast<double>(result.delivered);
  }
  return result;
}

}  // namespace spbp
