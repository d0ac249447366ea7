#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "agex/graph.hpp"
#include "agex/reward.hpp"
#include "agex/sim_env.hpp"
#include "oracles.hpp"

using namespace agex;

namespace {

const MultiModalAction kA{{36, 3, 11},
                          {SchedPolicy::waterfilling, SchedPolicy::proportional_fair,
                           SchedPolicy::proportional_fair}};
const MultiModalAction kB{{36, 3, 11},
                          {SchedPolicy::proportional_fair, SchedPolicy::round_robin,
                           SchedPolicy::waterfilling}};

}  // namespace

TEST_CASE("three-step replay yields the exact two-node graph") {
  Environment env({2, 2, 2}, TrafficProfile::trf1(), 3, LinkConfig{});
  StepOutput o1 = env.step(kA);
  StepOutput o2 = env.step(kB);
  StepOutput o3 = env.step(kA);

  AttributedGraph g;
  g.record(kA, o1.per_ue);
  g.record(kB, o2.per_ue);
  g.record(kA, o3.per_ue);

  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 2);
  CHECK(g.total_traversals() == 2);
  CHECK(g.node(kA).occurrence_count == 2);
  CHECK(g.node(kB).occurrence_count == 1);
  CHECK(g.edge_traversals(kA, kB) == 1);
  CHECK(g.edge_traversals(kB, kA) == 1);
  CHECK(g.edge_traversals(kB, kB) == 0);
  REQUIRE(g.last_node().has_value());
  CHECK(*g.last_node() == kA);

  // Merged attributes: the repeated node holds both occurrences' samples,
  // oldest first.
  for (int p = 0; p < kNumAttributes; ++p) {
    REQUIRE(g.node(kA).samples[p].size() == 2);
    CHECK(g.node(kA).samples[p][0] == o1.per_ue.values[p]);
    CHECK(g.node(kA).samples[p][1] == o3.per_ue.values[p]);
    REQUIRE(g.node(kB).samples[p].size() == 1);
    CHECK(g.node(kB).samples[p][0] == o2.per_ue.values[p]);
  }

  CHECK(g.neighbors(kA) == std::vector<MultiModalAction>{kB});
  CHECK(g.neighbors(kB) == std::vector<MultiModalAction>{kA});
}

TEST_CASE("expected_kpi is the raw sample mean") {
  AttributedGraph g;
  PerUeSamples s1, s2;
  s1.values[0] = {2.0};
  s2.values[0] = {4.0};
  g.record(kA, s1);
  g.record(kA, s2);
  CHECK(g.expected_kpi(kA, 0) == doctest::Approx(3.0));
  CHECK(g.expected_kpi(kA, 5) == 0.0);  // no samples recorded there
  CHECK_THROWS_AS(g.expected_kpi(kA, 9), std::invalid_argument);
  CHECK_THROWS_AS(g.expected_kpi(kB, 0), NotFoundError);
}

TEST_CASE("single-occurrence expected reward equals the window reward") {
  Environment env({2, 2, 2}, TrafficProfile::trf2(), 17, LinkConfig{});
  StepOutput out = env.step(kA);
  AttributedGraph g;
  g.record(kA, out.per_ue);
  for (const RewardConfig& cfg :
       {RewardConfig::high_throughput(), RewardConfig::low_latency()}) {
    CHECK(g.expected_reward(kA, cfg) ==
          doctest::Approx(reward(out.window, cfg)).epsilon(1e-12));
  }
}

TEST_CASE("multi-occurrence expected reward matches the mean-then-weight oracle") {
  Environment env({2, 2, 2}, TrafficProfile::trf1(), 29, LinkConfig{});
  AttributedGraph g;
  for (int s = 0; s < 6; ++s) g.record(kA, env.step(kA).per_ue);

  RewardConfig cfg = RewardConfig::high_throughput();
  std::array<int, 3> targets{static_cast<int>(cfg.target[0]), static_cast<int>(cfg.target[1]),
                             static_cast<int>(cfg.target[2])};
  double expected = oracle::mean_then_weight(g.node(kA).samples, g.node(kA).occurrence_count,
                                             kWindowRows, cfg.weights, targets);
  CHECK(g.expected_reward(kA, cfg) == doctest::Approx(expected).epsilon(1e-12));

  // Also equals the mean of the per-step window rewards.
  Environment env2({2, 2, 2}, TrafficProfile::trf1(), 29, LinkConfig{});
  double acc = 0.0;
  for (int s = 0; s < 6; ++s) acc += reward(env2.step(kA).window, cfg);
  CHECK(g.expected_reward(kA, cfg) == doctest::Approx(acc / 6.0).epsilon(1e-12));
}

TEST_CASE("edge traversals account for every recorded transition") {
  std::mt19937 rng(8);
  AttributedGraph g;
  PerUeSamples s;
  s.values[0] = {1.0};
  std::vector<MultiModalAction> pool{kA, kB};
  MultiModalAction c = kA, d = kB;
  c.prb = {11, 36, 3};
  d.prb = {3, 11, 36};
  pool.push_back(c);
  pool.push_back(d);
  int records = 60;
  for (int i = 0; i < records; ++i) g.record(pool[rng() % pool.size()], s);
  CHECK(g.total_traversals() == records - 1);
}

TEST_CASE("self transitions create self edges") {
  AttributedGraph g;
  PerUeSamples s;
  g.record(kA, s);
  g.record(kA, s);
  CHECK(g.node_count() == 1);
  CHECK(g.edge_count() == 1);
  CHECK(g.edge_traversals(kA, kA) == 1);
  CHECK(g.neighbors(kA) == std::vector<MultiModalAction>{kA});
}

TEST_CASE("neighbors are ascending and require an existing anchor") {
  AttributedGraph g;
  PerUeSamples s;
  MultiModalAction x = kA, y = kB, z = kA;
  z.prb = {3, 36, 11};
  g.record(x, s);
  g.record(z, s);
  g.record(x, s);
  g.record(y, s);
  auto n = g.neighbors(x);
  REQUIRE(n.size() == 2);
  CHECK(n[0] < n[1]);
  CHECK_THROWS_AS(g.neighbors(MultiModalAction{}), NotFoundError);
}

TEST_CASE("graph JSON round-trips structurally") {
  Environment env({1, 1, 1}, TrafficProfile::trf1(), 4, LinkConfig{});
  AttributedGraph g;
  g.record(kA, env.step(kA).per_ue);
  g.record(kB, env.step(kB).per_ue);
  g.record(kA, env.step(kA).per_ue);

  json j = g.to_json();
  AttributedGraph back = AttributedGraph::from_json(j);
  CHECK(back == g);
  CHECK(back.to_json() == j);

  json bad = j;
  bad["nodes"][0]["occurrences"] = 0;
  CHECK_THROWS_AS(AttributedGraph::from_json(bad), TraceError);
}

TEST_CASE("dot export names every node and edge") {
  AttributedGraph g;
  PerUeSamples s;
  g.record(kA, s);
  g.record(kB, s);
  std::string dot = g.to_dot();
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find(kA.label()) != std::string::npos);
  CHECK(dot.find(kB.label()) != std::string::npos);
  CHECK(dot.find("->") != std::string::npos);
  CHECK(dot.find("occ=1") != std::string::npos);
}
