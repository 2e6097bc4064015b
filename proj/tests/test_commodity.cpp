#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "spbp/commodity.hpp"
#include "support.hpp"

using namespace spbp;

namespace {

// Two nodes, one commodity at node 1, link weight b so that B_0 = b.
struct PairFixture {
  ConnectivityGraph g = testing::line_graph(2);
  NetworkState s;
  explicit PairFixture(double b) : s(2, compute_bias(g, std::vector<double>(2, b), {1})) {}
};

// Best achievable utility sum(g_c * U_c) with sum(g_c) <= budget, 0 <= g_c <= Q_c,
// only positive-U commodities, by exhaustive dynamic programming over the budget.
double best_allocation(const std::vector<double>& u, const std::vector<std::int64_t>& q, std::int64_t budget) {
  std::vector<double> best(static_cast<std::size_t>(budget + 1), 0.0);
  for (std::size_t c = 0; c < u.size(); ++c) {
    if (!(u[c] > 0.0)) continue;
    std::vector<double> next = best;
    for (std::int64_t b = 0; b <= budget; ++b)
      for (std::int64_t g = 1; g <= std::min(q[c], b); ++g)
        next[static_cast<std::size_t>(b)] =
            std::max(next[static_cast<std::size_t>(b)], best[static_cast<std::size_t>(b - g)] + static_cast<double>(g) * u[c]);
    best = std::move(next);
  }
  return *std::max_element(best.begin(), best.end());
}

}  // namespace

TEST_CASE("exclusive selection picks the max backpressure, lower index on ties") {
  CHECK(exclusive_select(std::vector<double>{4.0}) == 0);
  CHECK(exclusive_select(std::vector<double>{6.5, -1.0, 6.5}) == 0);
  CHECK(exclusive_select(std::vector<double>{-3.0, -1.0, -2.0}) == 1);
}

TEST_CASE("exclusive assignment hand values") {
  PairFixture f(3.0);
  f.s.inject({0, 0, 3, 0});
  const std::vector<double> rates{10.0, 10.0};
  const auto ra = exclusive_assign(f.s, f.g, rates);
  CHECK(ra.gamma_row(0)[0] == 3);
  CHECK(ra.w[0] == 18.0);
  CHECK(ra.gamma_row(1)[0] == 0);  // negative backpressure on the reverse link
  CHECK(ra.w[1] == 0.0);
}

TEST_CASE("rate budget is the floor of the real-time rate") {
  PairFixture f(1.0);
  f.s.inject({0, 0, 100, 0});
  const std::vector<double> rates{2.9, 2.9};
  const auto ra = exclusive_assign(f.s, f.g, rates);
  CHECK(ra.gamma_row(0)[0] == 2);
  CHECK(ra.w[0] == doctest::Approx(2.0 * 101.0));
  CHECK(maxu_assign(f.s, f.g, rates).gamma_row(0)[0] == 2);
}

TEST_CASE("sequential allocation walks the residual budget") {
  LinkPlan plan{{0, 1, 2}, 5};
  const std::vector<double> u{3.0, 2.0, 1.0};
  const std::vector<std::int64_t> q{2, 4, 3};
  std::vector<std::int64_t> gamma(3);
  const double w = allocate_link(plan, u, q, gamma);
  CHECK(gamma == std::vector<std::int64_t>{2, 3, 0});
  CHECK(w == 2 * 3.0 + 3 * 2.0);
}

TEST_CASE("max-utility filters non-positive backpressure and empty queues") {
  // Star: node 0 relays for commodities at nodes 1 and 2.
  const auto g = testing::disk_graph({{0, 0}, {0.9, 0}, {-0.9, 0}}, 1.0);
  NetworkState s(3, compute_bias(g, std::vector<double>(static_cast<std::size_t>(g.link_count()), 1.0), {1, 2}));
  const std::vector<double> rates(static_cast<std::size_t>(g.link_count()), 20.0);
  auto ra = maxu_assign(s, g, rates);
  for (double w : ra.w) CHECK(w == 0.0);  // empty queues everywhere
  s.inject({0, 0, 4, 0});
  ra = maxu_assign(s, g, rates);
  const auto to1 = *g.find_link(0, 1);
  const auto to2 = *g.find_link(0, 2);
  CHECK(ra.gamma_row(to1)[0] == 4);
  CHECK(ra.gamma_row(to1)[1] == 0);  // commodity 2 has no packets at 0
  // Links allocate independently: the same four packets are also claimed
  // towards node 2, where the backpressure is 5 - 2 = 3.
  CHECK(ra.gamma_row(to2)[0] == 4);
  CHECK(ra.w[to2] == 12.0);
  CHECK(ra.w[*g.find_link(1, 0)] == 0.0);
}

TEST_CASE("max-utility equals exclusive when the top commodity saturates the link") {
  std::mt19937_64 rng(4);
  const auto g = generate_network(12, 77);
  const std::vector<NodeId> dests{1, 4, 7, 10};
  NetworkState s(g.node_count(), compute_bias(g, edge_weights(assign_link_rates(g, 1), BiasScheme::sp_rbar), dests));
  std::uniform_int_distribution<int> cnt(20, 60);
  for (NodeId i = 0; i < g.node_count(); ++i)
    for (int k = 0; k < 4; ++k)
      if (dests[static_cast<std::size_t>(k)] != i) s.inject({i, k, cnt(rng), 0});
  const std::vector<double> rates(static_cast<std::size_t>(g.link_count()), 15.5);
  const auto ex = exclusive_assign(s, g, rates);
  const auto mx = maxu_assign(s, g, rates);
  CHECK(ex.gamma == mx.gamma);
  CHECK(ex.w == mx.w);
}

TEST_CASE("max-utility attains the best allocation and dominates exclusive selection") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> cnt(0, 12);
  std::uniform_real_distribution<double> rate(0.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = generate_network(6 + trial % 6, 3000 + static_cast<std::uint64_t>(trial));
    std::vector<NodeId> dests;
    for (NodeId i = 0; i < g.node_count(); i += 2) dests.push_back(i);
    NetworkState s(g.node_count(),
                   compute_bias(g, edge_weights(assign_link_rates(g, trial), BiasScheme::sp_rbar_rmax_over_r), dests));
    const auto C = dests.size();
    for (NodeId i = 0; i < g.node_count(); ++i)
      for (std::size_t k = 0; k < C; ++k)
        if (dests[k] != i) s.inject({i, static_cast<int>(k), cnt(rng), 0});
    std::vector<double> rates(static_cast<std::size_t>(g.link_count()));
    for (auto& r : rates) r = rate(rng);
    const auto bp = backpressure_matrix(s, g);
    const auto mx = maxu_assign(s, g, rates, bp);
    const auto ex = exclusive_assign(s, g, rates, bp);
    for (const auto& l : g.links()) {
      std::vector<double> u(C);
      std::vector<std::int64_t> q(C);
      for (std::size_t k = 0; k < C; ++k) {
        u[k] = bp[static_cast<std::size_t>(l.id) * C + k];
        q[k] = s.queue(l.src, static_cast<int>(k));
      }
      const auto budget = static_cast<std::int64_t>(std::floor(rates[static_cast<std::size_t>(l.id)]));
      CHECK(mx.w[static_cast<std::size_t>(l.id)] == doctest::Approx(best_allocation(u, q, budget)));
      CHECK(mx.w[static_cast<std::size_t>(l.id)] >= ex.w[static_cast<std::size_t>(l.id)] - 1e-9);
      std::int64_t total = 0;
      double w = 0.0;
      for (std::size_t k = 0; k < C; ++k) {
        const auto gk = mx.gamma_row(l.id)[k];
        CHECK(gk >= 0);
        CHECK(gk <= q[k]);
        if (gk > 0) CHECK(u[k] > 0.0);
        total += gk;
        w += static_cast<double>(gk) * std::max(u[k], 0.0);
      }
      CHECK(total <= budget);
      CHECK(w == doctest::Approx(mx.w[static_cast<std::size_t>(l.id)]));
      // Exclusive: whole budget to the argmax, capped by its backlog.
      std::size_t star = 0;
      for (std::size_t k = 1; k < C; ++k)
        if (u[k] > u[star]) star = k;
      const double want = u[star] > 0.0 ? static_cast<double>(std::min(budget, q[star])) * u[star] : 0.0;
      CHECK(ex.w[static_cast<std::size_t>(l.id)] == doctest::Approx(want));
    }
  }
}

TEST_CASE("preliminary assignment starts undecided with zero final rates") {
  PairFixture f(2.0);
  f.s.inject({0, 0, 3, 0});
  const auto ra = assign_rates(CommoditySelection::maxu, f.s, f.g, std::vector<double>{5.0, 5.0},
                               backpressure_matrix(f.s, f.g));
  for (auto x : ra.x) CHECK(x == Decision::undecided);
  for (auto m : ra.mu) CHECK(m == 0);
  CHECK(ra.plans[0].budget == 5);
  CHECK(ra.plans[0].order == std::vector<int>{0});
  CHECK(ra.plans[1].order.empty());
}
