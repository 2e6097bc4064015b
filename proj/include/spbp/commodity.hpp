#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spbp/queueing.hpp"
#include "spbp/topology.hpp"

namespace spbp {

enum class CommoditySelection { exclusive, maxu };

enum class Decision : std::int8_t { undecided = -1, muted = 0, scheduled = 1 };

/// Commodities a link may serve, in allocation order, and its integer rate
/// budget floor(r_e(t)). Exclusive selection yields at most one entry.
struct LinkPlan {
  std::vector<int> order;
  std::int64_t budget = 0;
};

/// Preliminary (gamma) and final (mu) per-(link, commodity) packet counts,
/// link utilities w and schedule x. Matrices are link-major.
struct RateAssignment {
  RateAssignment() = default;
  RateAssignment(int links, int commodities);

  int link_count = 0;
  int commodity_count = 0;
  std::vector<std::int64_t> gamma;
  std::vector<std::int64_t> mu;
  std::vector<double> w;
  std::vector<Decision> x;
  std::vector<LinkPlan> plans;

  std::span<std::int64_t> gamma_row(LinkId e) {
    return {gamma.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(commodity_count),
            static_cast<std::size_t>(commodity_count)};
  }
  std::span<const std::int64_t> gamma_row(LinkId e) const {
    return {gamma.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(commodity_count),
            static_cast<std::size_t>(commodity_count)};
  }
  std::span<std::int64_t> mu_row(LinkId e) {
    return {mu.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(commodity_count),
            static_cast<std::size_t>(commodity_count)};
  }
  std::span<const std::int64_t> mu_row(LinkId e) const {
    return {mu.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(commodity_count),
            static_cast<std::size_t>(commodity_count)};
  }
  std::int64_t gamma_sum(LinkId e) const;
  std::int64_t mu_sum(LinkId e) const;
};

/// Node-major copy of the queue lengths.
std::vector<std::int64_t> queue_matrix(const NetworkState& s);

/// Argmax of a backpressure row; ties go to the lower commodity index.
int exclusive_select(std::span<const double> backpressure_row);
int exclusive_select(const NetworkState& s, const Link& l);

/// Sequential allocation of `plan.budget` over plan.order, each commodity
/// capped by its backlog. Writes the gamma row and returns the utility
/// sum(gamma * max(U, 0)).
double allocate_link(const LinkPlan& plan, std::span<const double> backpressure_row,
                     std::span<const std::int64_t> backlog_row, std::span<std::int64_t> gamma_row);

/// Classic exclusive selection: the whole link budget goes to the
/// max-backpressure commodity, if its backpressure is positive.
RateAssignment exclusive_assign(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates,
                                std::span<const double> backpressures);
RateAssignment exclusive_assign(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates);

/// Max-utility link sharing: commodities with positive backpressure and a
/// non-empty queue share the link budget in decreasing backpressure order.
RateAssignment maxu_assign(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates,
                           std::span<const double> backpressures);
RateAssignment maxu_assign(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates);

RateAssignment assign_rates(CommoditySelection selection, const NetworkState& s, const ConnectivityGraph& g,
                            std::span<const double> rates, std::span<const double> backpressures);

}  // namespace spbp
