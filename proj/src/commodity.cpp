#include "spbp/commodity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spbp {

RateAssignment::RateAssignment(int links, int commodities)
    : link_count(links),
      commodity_count(commodities),
      gamma(static_cast<std::size_t>(links) * static_cast<std::size_t>(commodities), 0),
      mu(gamma.size(), 0),
      w(static_cast<std::size_t>(links), 0.0),
      x(static_cast<std::size_t>(links), Decision::undecided),
      plans(static_cast<std::size_t>(links)) {}

std::int64_t RateAssignment::gamma_sum(LinkId e) const {
  const auto row = gamma_row(e);
  return std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

std::int64_t RateAssignment::mu_sum(LinkId e) const {
  const auto row = mu_row(e);
  return std::accumulate(row.begin(), row.end(), std::int64_t{0});
}

std::vector<std::int64_t> queue_matrix(const NetworkState& s) {
  std::vector<std::int64_t> q(static_cast<std::size_t>(s.node_count()) * static_cast<std::size_t>(s.commodity_count()));
  std::size_t idx = 0;
  for (NodeId i = 0; i < s.node_count(); ++i) {
    for (int k = 0; k < s.commodity_count(); ++k) q[idx++] = s.queue(i, k);
  }
  return q;
}

int exclusive_select(std::span<const double> row) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(row.size()); ++k) {
    if (row[static_cast<std::size_t>(k)] > row[static_cast<std::size_t>(best)]) best = k;
  }
  return best;
}

int exclusive_select(const NetworkState& s, const Link& l) {
  std::vector<double> row(static_cast<std::size_t>(s.commodity_count()));
  for (int k = 0; k < s.commodity_count(); ++k) row[static_cast<std::size_t>(k)] = backpressure(s, l, k);
  return exclusive_select(row);
}

double allocate_link(const LinkPlan& plan, std::span<const double> bp_row, std::span<const std::int64_t> backlog_row,
                     std::span<std::int64_t> gamma_row) {
  std::fill(gamma_row.begin(), gamma_row.end(), 0);
  std::int64_t residual = plan.budget;
  double w = 0.0;
  for (int k : plan.order) {
    if (residual <= 0) break;
    const auto kk = static_cast<std::size_t>(k);
    const std::int64_t g = std::min(residual, std::max<std::int64_t>(backlog_row[kk], 0));
    gamma_row[kk] = g;
    residual -= g;
    w += static_cast<double>(g) * std::max(bp_row[kk], 0.0);
  }
  return w;
}

namespace {

std::int64_t link_budget(double rate) { return static_cast<std::int64_t>(std::floor(std::max(rate, 0.0))); }

template <typename PlanFn>
RateAssignment assign_with(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates,
                           std::span<const double> bp, PlanFn&& make_plan) {
  const int C = s.commodity_count();
  const auto Cs = static_cast<std::size_t>(C);
  RateAssignment ra(g.link_count(), C);
  const auto q = queue_matrix(s);
  for (const auto& l : g.links()) {
    const auto e = static_cast<std::size_t>(l.id);
    const std::span<const double> bp_row(bp.data() + e * Cs, Cs);
    const std::span<const std::int64_t> q_row(q.data() + static_cast<std::size_t>(l.src) * Cs, Cs);
    auto& plan = ra.plans[e];
    plan.budget = link_budget(rates[e]);
    if (C > 0) make_plan(bp_row, q_row, plan.order);
    ra.w[e] = allocate_link(plan, bp_row, q_row, ra.gamma_row(l.id));
  }
  return ra;
}

}  // namespace

RateAssignment exclusive_assign(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates,
                                std::span<const double> bp) {
  return assign_with(s, g, rates, bp, [](auto bp_row, auto q_row, std::vector<int>& order) {
    const int best = exclusive_select(bp_row);
    const auto b = static_cast<std::size_t>(best);
    if (bp_row[b] > 0.0 && q_row[b] > 0) order.push_back(best);
  });
}

RateAssignment maxu_assign(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates,
                           std::span<const double> bp) {
  return assign_with(s, g, rates, bp, [](auto bp_row, auto q_row, std::vector<int>& order) {
    for (int k = 0; k < static_cast<int>(bp_row.size()); ++k) {
      const auto kk = static_cast<std::size_t>(k);
      if (bp_row[kk] > 0.0 && q_row[kk] > 0) order.push_back(k);
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return bp_row[static_cast<std::size_t>(a)] > bp_row[static_cast<std::size_t>(b)];
    });
  });
}

RateAssignment exclusive_assign(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates) {
  return exclusive_assign(s, g, rates, backpressure_matrix(s, g));
}

RateAssignment maxu_assign(const NetworkState& s, const ConnectivityGraph& g, std::span<const double> rates) {
  return maxu_assign(s, g, rates, backpressure_matrix(s, g));
}

RateAssignment assign_rates(CommoditySelection selection, const NetworkState& s, const ConnectivityGraph& g,
                            std::span<const double> rates, std::span<const double> bp) {
  return selection == CommoditySelection::maxu ? maxu_assign(s, g, rates, bp) : exclusive_assign(s, g, rates, bp);
}

}  // namespace spbp
