#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spbp/commodity.hpp"
#include "spbp/conflicts.hpp"
#include "spbp/topology.hpp"

namespace spbp {

enum class SchedulerKind { lgs, lgs_ach, lgs_mimo };

std::string_view to_string(SchedulerKind kind);
SchedulerKind parse_scheduler(std::string_view name);

/// One scheduling decision, emitted in decision order.
struct DecisionEvent {
  int iteration = 0;
  LinkId link = 0;
  std::string_view action;  // "mute", "schedule", "grant", "reject"
  double weight = 0.0;
};
using DecisionTrace = std::function<void(const DecisionEvent&)>;

/// Devices each node exchanges control messages with: endpoints of every
/// link that conflicts with, or shares a hyperedge with, a link incident to
/// the node. Symmetric; excludes the node itself.
std::vector<std::vector<NodeId>> nearby_devices(const ConnectivityGraph& g, const ConflictStructure& cs);

/// Slot inputs shared by all schedulers.
struct ScheduleContext {
  const ConnectivityGraph* graph = nullptr;
  const ConflictStructure* conflicts = nullptr;
  const TransceiverSpec* radios = nullptr;
  std::span<const double> rates;          // real-time rates, one per link
  std::span<const double> backpressures;  // link-major
  std::span<const std::int64_t> queues;   // node-major
  int max_iterations = 20;
  // Keep the preliminary rates fixed while scheduling.
  bool decouple = false;
  const std::vector<std::vector<NodeId>>* nearby = nullptr;
  const DecisionTrace* trace = nullptr;
};

/// Residual resources while a slot is being scheduled.
struct SchedulerState {
  explicit SchedulerState(const ScheduleContext& ctx);

  std::vector<std::int64_t> residual_queues;
  std::vector<double> residual_eta_tx;
  std::vector<int> residual_eta_rx;
  std::vector<double> tau;
};

/// Re-allocates every undecided link's plan against the residual queues and
/// refreshes its utility and transmission cost. Utilities never increase.
void rate_reassign(SchedulerState& state, RateAssignment& ra, const ScheduleContext& ctx);

/// Wave-based local greedy schedule on a pairwise conflict graph. Links with
/// non-positive weight are muted up front; each wave schedules every
/// undecided link heavier than all undecided neighbours (lower id wins ties).
std::vector<Decision> lgs_siso(std::span<const double> weights, const ConflictStructure& cs);

/// lgs_siso on the context's conflict graph, then mu = gamma on scheduled links.
void schedule_lgs(RateAssignment& ra, const ScheduleContext& ctx);

/// Local greedy scheduling over the capacity hypergraph with in-loop rate
/// reassignment, at most ctx.max_iterations waves.
void schedule_lgs_ach(RateAssignment& ra, const ScheduleContext& ctx);

/// Distributed RTS/CTS realisation: per round, each transmitter advertises
/// its best undecided link, receivers grant requests from a greedy local
/// weighted independent set, and transmitters commit unless a nearby device
/// rejected the request.
void schedule_lgs_mimo(RateAssignment& ra, const ScheduleContext& ctx);

void schedule(SchedulerKind kind, RateAssignment& ra, const ScheduleContext& ctx);

/// Makes a decoupled schedule executable: where the scheduled links of a
/// node together claim more packets of a commodity than are queued, each
/// queued packet picks one of those links at random (among links with
/// remaining rate) and mu becomes the resulting counts.
void resolve_duplicate_claims(RateAssignment& ra, const ConnectivityGraph& g, std::span<const std::int64_t> queues,
                              std::uint64_t seed);

/// Checks rate, backlog, pairwise, and hyperedge capacity constraints of
/// the final rates. Returns one message per violation.
std::vector<std::string> feasibility_violations(const RateAssignment& ra, const ScheduleContext& ctx);

/// Throws InfeasibleAssignment listing the violations, if any.
void check_feasibility(const RateAssignment& ra, const ScheduleContext& ctx);

}  // namespace spbp
