#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spbp/bias.hpp"
#include "spbp/commodity.hpp"
#include "spbp/conflicts.hpp"
#include "spbp/queueing.hpp"
#include "spbp/scheduler.hpp"
#include "spbp/topology.hpp"

namespace spbp {

enum class TrafficKind { streaming, bursty };

std::string_view to_string(TrafficKind kind);

struct FlowSpec {
  NodeId src = 0;
  NodeId dst = 0;
  double rate = 0.0;  // mean packets per slot
  TrafficKind kind = TrafficKind::streaming;
  int start_slot = 0;  // bursty only
  int duration = 0;    // bursty only
};

struct TrafficParams {
  double mix = 0.5;  // probability a flow is streaming
  std::optional<double> lambda;  // identical rate for every flow
  double flow_fraction = 0.4;
  double lambda_min = 0.1;
  double lambda_max = 1.0;
  int burst_duration = 30;
  int burst_margin = 100;  // bursts start in [0, T - margin]
};

/// floor(flow_fraction * |V|) flows over distinct (src, dst) pairs.
std::vector<FlowSpec> generate_flows(const ConnectivityGraph& g, std::uint64_t seed, int T,
                                     const TrafficParams& params = {});

bool flow_active(const FlowSpec& f, int t);

/// Poisson arrivals of every flow at slot t, keyed by (seed, flow, t).
std::vector<int> flow_arrivals(const std::vector<FlowSpec>& flows, int t, std::uint64_t seed);

/// Sorted distinct destinations.
std::vector<NodeId> flow_commodities(const std::vector<FlowSpec>& flows);

struct FlowMetrics {
  std::int64_t injected = 0;
  std::int64_t delivered = 0;
  double throughput = 0.0;
  double mean_latency = 0.0;   // delivered packets only; 0 if none
  double delivery_ratio = 0.0;  // 0 if nothing injected
  double trip_length = 0.0;    // mean hops of delivered packets; 0 if none
  double composite_latency = 0.0;
};

/// Per-flow metrics from packet records over a horizon of T slots.
std::vector<FlowMetrics> flow_metrics(const std::vector<PacketRecord>& packets, std::size_t flow_count, int T);

/// Linear-interpolation percentile (p in [0, 100]) of unsorted values.
double percentile(std::vector<double> values, double p);

struct MetricSummary {
  double mean = 0.0;
  double p95 = 0.0;
};

/// Aggregates over one traffic class ("all", "streaming", "bursty"). Flows
/// that injected nothing are left out; latency and trip length also leave
/// out flows that delivered nothing. Each percentile is taken per metric.
struct ClassAggregate {
  std::string traffic;
  int flows = 0;
  MetricSummary throughput;
  MetricSummary mean_latency;
  MetricSummary delivery_ratio;
  MetricSummary trip_length;
  MetricSummary composite_latency;
};

std::vector<ClassAggregate> aggregate_flows(const std::vector<FlowSpec>& flows, const std::vector<FlowMetrics>& metrics);

/// Antenna assignment: all single-antenna, sampled per node, or fixed count.
struct AntennaMode {
  enum class Kind { siso, distribution, fixed } kind = Kind::distribution;
  int count = 1;
};

AntennaMode parse_antenna_mode(std::string_view text);
std::string to_string(const AntennaMode& mode);

struct RadioParams {
  double interference_range = 1.5;
  bool nullification = true;
  AntennaMode antennas;
};

struct Variant {
  std::string name;
  CommoditySelection selection = CommoditySelection::maxu;
  BiasScheme bias = BiasScheme::sp_rbar;
  SchedulerKind scheduler = SchedulerKind::lgs_mimo;
  bool decouple = false;
  std::optional<AntennaMode> antennas;  // overrides RadioParams::antennas
};

std::string_view to_string(CommoditySelection s);
CommoditySelection parse_selection(std::string_view text);
std::string_view to_string(BiasScheme b);
BiasScheme parse_bias(std::string_view text);

struct ScenarioSpec {
  int nodes = 30;
  std::uint64_t instance_seed = 1;     // network and antennas
  std::uint64_t realization_seed = 1;  // rates, flows, arrivals
  int T = 1000;
  GenerationParams generation;
  RateParams rates;
  TrafficParams traffic;
  RadioParams radio;
  int max_iterations = 20;
};

/// Everything shared by the variants compared on one realization.
struct Scenario {
  ScenarioSpec spec;
  ConnectivityGraph graph;
  LinkRates rates;
  std::vector<int> sampled_antennas;
  std::vector<FlowSpec> flows;
};

Scenario make_scenario(const ScenarioSpec& spec);

struct RunOptions {
  bool check_feasibility = true;
  // Recompute both selection rules every slot and count links where the
  // max-utility weight falls below the exclusive one.
  bool check_dominance = false;
  std::ostream* queue_dump = nullptr;  // CSV, one row per slot
  std::ostream* trace = nullptr;       // JSON lines of scheduling decisions
  // Where to write the decision trace of a slot that fails the check.
  std::string failure_trace_path;
};

struct RunResult {
  std::vector<FlowMetrics> flows;
  std::vector<ClassAggregate> aggregates;
  std::int64_t injected = 0;
  std::int64_t delivered = 0;
  double mean_packet_latency = 0.0;
  double mean_packet_hops = 0.0;
  std::int64_t dominance_checks = 0;
  std::int64_t dominance_violations = 0;
};

/// Raised when a slot's schedule fails the feasibility check.
class SlotFailure : public InfeasibleAssignment {
 public:
  SlotFailure(int slot, std::string trace_path, const std::string& what);
  int slot() const noexcept { return slot_; }
  const std::string& trace_path() const noexcept { return trace_path_; }

 private:
  int slot_;
  std::string trace_path_;
};

/// Single-antenna radios for the SISO scheduler, else the variant or scenario antenna mode.
TransceiverSpec radios_for(const Scenario& scenario, const Variant& variant);

RunResult run(const Scenario& scenario, const Variant& variant, const RunOptions& options = {});

}  // namespace spbp
