#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "spbp/conflicts.hpp"
#include "support.hpp"

using namespace spbp;

namespace {

ConflictStructure siso_of(const ConnectivityGraph& g, double range) { return build_siso_conflict_graph(g, range); }

}  // namespace

TEST_CASE("links sharing a node conflict") {
  const auto g = testing::line_graph(3);  // A=0, B=1, C=2
  const auto cs = siso_of(g, 0.0);
  const auto ab = *g.find_link(0, 1);
  const auto bc = *g.find_link(1, 2);
  CHECK(cs.conflicts(ab, bc));
  CHECK(cs.conflicts(bc, ab));
}

TEST_CASE("geometrically separated links do not conflict") {
  const auto g = testing::disk_graph({{0, 0}, {1, 0}, {10, 0}, {11, 0}}, 1.0);
  const auto cs = siso_of(g, 1.5);
  CHECK_FALSE(cs.conflicts(*g.find_link(0, 1), *g.find_link(2, 3)));
  CHECK_FALSE(cs.conflicts(*g.find_link(1, 0), *g.find_link(3, 2)));
}

TEST_CASE("SISO conflict graph equals the brute-force pairwise predicate") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 5 + trial % 8;
    const auto g = testing::random_disk_graph(n, 2.5, 1.0, rng);
    const double range = 1.5;
    const auto cs = siso_of(g, range);
    std::size_t edges = 0;
    for (LinkId a = 0; a < g.link_count(); ++a) {
      for (LinkId b = 0; b < g.link_count(); ++b) {
        if (a == b) continue;
        CHECK(cs.conflicts(a, b) == testing::siso_conflict_oracle(g, range, a, b));
        edges += testing::siso_conflict_oracle(g, range, a, b) ? 1 : 0;
      }
    }
    CHECK(cs.pair_edge_count() == edges / 2);
  }
}

TEST_CASE("ACH pair edges equal the receiver-harm predicate") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> ant(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 5 + trial % 9;
    const auto g = testing::random_disk_graph(n, 2.5, 1.0, rng);
    std::vector<int> antennas(static_cast<std::size_t>(n));
    for (auto& a : antennas) a = ant(rng);
    const auto radios = TransceiverSpec::from_antennas(antennas);
    for (bool null : {true, false}) {
      const AchOptions opts{1.5, null};
      const auto cs = build_ach(g, radios, opts);
      for (LinkId a = 0; a < g.link_count(); ++a)
        for (LinkId b = a + 1; b < g.link_count(); ++b)
          CHECK(cs.conflicts(a, b) == testing::ach_conflict_oracle(g, radios, 1.5, null, a, b));
    }
  }
}

TEST_CASE("single-antenna ACH degenerates to the SISO conflict graph") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 4 + trial % 10;
    const auto g = testing::random_disk_graph(n, 2.0, 1.0, rng);
    const auto radios = TransceiverSpec::siso(n);
    const auto ach = build_ach(g, radios, {1.5, true});
    const auto siso = siso_of(g, 1.5);
    CHECK(ach.pair_edges() == siso.pair_edges());
    for (const auto& h : ach.hyperedges()) CHECK(h.capacity == 1.0);
  }
}

TEST_CASE("hyperedge capacities follow antenna counts") {
  const auto g = testing::disk_graph({{0, 0}, {0.8, 0}, {0, 0.8}, {-0.8, 0}}, 1.0);
  const auto radios = TransceiverSpec::from_antennas({3, 1, 2, 1});
  const auto cs = build_ach(g, radios, {1.5, true});
  CHECK(cs.tx_hyperedge(0).capacity == 3.0);
  CHECK(cs.rx_hyperedge(0).capacity == 3.0);
  CHECK(cs.tx_hyperedge(2).capacity == 2.0);
  CHECK(cs.rx_hyperedge(1).capacity == 1.0);
  std::vector<LinkId> out0(g.out_links(0).begin(), g.out_links(0).end());
  std::vector<LinkId> in0(g.in_links(0).begin(), g.in_links(0).end());
  CHECK(cs.tx_hyperedge(0).members == out0);
  CHECK(cs.rx_hyperedge(0).members == in0);
  CHECK(cs.hyperedges().size() == 8);
}

TEST_CASE("multi-antenna receivers drop interference edges that single-antenna receivers keep") {
  // Hub H=0 with transmitters T1=1 and T2=2 serving receivers C=3 (one
  // antenna) and A=4 (two antennas). T2 is within range of both receivers.
  const std::vector<Point> pts{{0, 0}, {-1.0, 0.5}, {1.0, 0.5}, {-1.0, -0.4}, {1.0, -0.4}};
  const auto g = testing::disk_graph(pts, 1.2);
  const auto radios = TransceiverSpec::from_antennas({2, 1, 1, 1, 2});
  const auto cs = build_ach(g, radios, {2.3, true});
  const auto t1c = *g.find_link(1, 3);
  const auto t2a = *g.find_link(2, 4);
  const auto t2c = g.find_link(2, 3);
  REQUIRE_FALSE(t2c.has_value());
  // Hand-built expectations: C cannot null T2, so T1->C conflicts with T2->A.
  CHECK(cs.conflicts(t1c, t2a));
  // The two-antenna hub nulls whichever transmitter it is not serving.
  const auto t1_to_hub = *g.find_link(1, 0);
  const auto t2_to_hub = *g.find_link(2, 0);
  CHECK_FALSE(cs.conflicts(t1_to_hub, t2_to_hub));  // hub has two antennas
  const auto siso = build_ach(g, TransceiverSpec::siso(5), {2.3, true});
  CHECK(siso.conflicts(t1_to_hub, t2_to_hub));
  // Multi-antenna receiver with nullification off behaves like one antenna.
  const auto no_null = build_ach(g, radios, {2.3, false});
  CHECK(no_null.conflicts(t1_to_hub, t2_to_hub));
}

TEST_CASE("half-duplex edges survive any antenna count") {
  const auto g = testing::line_graph(3);
  const auto cs = build_ach(g, TransceiverSpec::from_antennas({4, 4, 4}), {0.1, true});
  CHECK(cs.conflicts(*g.find_link(0, 1), *g.find_link(1, 2)));
  CHECK(cs.conflicts(*g.find_link(0, 1), *g.find_link(1, 0)));
  // Shared multi-antenna transmitter: streams separated, no pair edge.
  CHECK_FALSE(cs.conflicts(*g.find_link(1, 0), *g.find_link(1, 2)));
}

TEST_CASE("neighbour lists are symmetric and sorted") {
  const auto g = generate_network(25, 4);
  const auto cs = build_ach(g, TransceiverSpec::from_antennas(sample_antennas(25, 4)), {1.5, true});
  for (LinkId a = 0; a < g.link_count(); ++a) {
    const auto nb = cs.neighbors(a);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
    for (LinkId b : nb) {
      CHECK(b != a);
      CHECK(cs.conflicts(b, a));
    }
  }
}

TEST_CASE("transmission cost") {
  CHECK(tx_cost(7, 10, 2) == 1.0);
  CHECK(tx_cost(0, 10, 3) == 1.0);
  CHECK(tx_cost(4, 10, 1) == doctest::Approx(0.4));
  CHECK(tx_cost(0, 10, 1) == 0.0);
  CHECK(tx_cost(3, 0, 1) == 1.0);
}

TEST_CASE("conflict export format") {
  const auto g = testing::line_graph(2);
  const auto cs = build_siso_conflict_graph(g, 1.5);
  std::ostringstream os;
  write_conflicts(os, cs);
  CHECK(os.str() == "P 0 1\nH tx 0 1 0\nH rx 0 1 1\nH tx 1 1 1\nH rx 1 1 0\n");
}
