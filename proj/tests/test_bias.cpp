#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <sstream>

#include "spbp/bias.hpp"
#include "support.hpp"

using namespace spbp;

TEST_CASE("equal rates give identical uniform weights under both schemes") {
  LinkRates r{{20.0, 20.0, 20.0, 20.0}};
  CHECK(edge_weights(r, BiasScheme::sp_rbar) == std::vector<double>(4, 20.0));
  CHECK(edge_weights(r, BiasScheme::sp_rbar_rmax_over_r) == std::vector<double>(4, 20.0));
}

TEST_CASE("mean-rate and inverse-rate weights") {
  LinkRates r{{10.0, 26.0, 42.0}};
  const auto flat = edge_weights(r, BiasScheme::sp_rbar);
  for (double w : flat) CHECK(w == doctest::Approx(26.0));
  const auto inv = edge_weights(r, BiasScheme::sp_rbar_rmax_over_r);
  CHECK(inv[0] == doctest::Approx(109.2));
  CHECK(inv[1] == doctest::Approx(42.0));
  CHECK(inv[2] == doctest::Approx(26.0));
}

TEST_CASE("line distances compose and destinations have zero bias") {
  const auto g = testing::line_graph(3);
  const std::vector<double> w(static_cast<std::size_t>(g.link_count()), 7.0);
  const auto b = compute_bias(g, w, {2});
  CHECK(b.at(0, 0) == 14.0);
  CHECK(b.at(1, 0) == 7.0);
  CHECK(b.at(2, 0) == 0.0);
}

TEST_CASE("bias matches Floyd-Warshall on random graphs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> weight(0.5, 80.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = generate_network(5 + trial % 20, 900 + static_cast<std::uint64_t>(trial));
    std::vector<double> w(static_cast<std::size_t>(g.link_count()));
    for (auto& x : w) x = weight(rng);
    std::vector<NodeId> all(static_cast<std::size_t>(g.node_count()));
    std::iota(all.begin(), all.end(), 0);
    const auto b = compute_bias(g, w, all);
    const auto d = testing::floyd_warshall(g.node_count(), testing::endpoints(g), w);
    for (NodeId i = 0; i < g.node_count(); ++i)
      for (int k = 0; k < b.commodity_count(); ++k) {
        const double want = d[i][all[k]];
        CHECK(std::abs(b.at(i, k) - want) <= 1e-9 * std::max(1.0, want));
      }
  }
}

TEST_CASE("unreachable destinations and invalid weights are rejected") {
  const auto g = testing::disk_graph({{0, 0}, {0.5, 0}, {5, 0}}, 1.0);
  CHECK_THROWS_AS(compute_bias(g, std::vector<double>(2, 1.0), {2}), UnreachableDestination);
  CHECK_THROWS_AS(compute_bias(g, std::vector<double>(2, 0.0), {1}), std::invalid_argument);
  CHECK_THROWS_AS(compute_bias(g, std::vector<double>(1, 1.0), {1}), std::invalid_argument);
}

TEST_CASE("bias table export") {
  const auto g = testing::line_graph(3);
  const auto b = compute_bias(g, std::vector<double>(4, 2.0), {0, 2});
  std::ostringstream os;
  write_bias_csv(os, b);
  CHECK(os.str() == "node,0,2\n0,0,4\n1,2,2\n2,4,0\n");
}
