#include "helpers.hpp"

#include <coplan/io.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace coplan;
using coplan::test::make_agent;
using coplan::test::make_mdp;

namespace {

// A deterministic walk A -> B -> C -> M ending on M, with `alpha` enabled at M.
Agent walker(const std::string& id, const std::string& start) {
  return make_agent(id, make_mdp({"A", "B", "C", "M"}, {"alpha"}, {"step_" + id},
                                 {{"A", "step_" + id, "B", 1.0},
                                  {"B", "step_" + id, "C", 1.0},
                                  {"C", "step_" + id, "M", 1.0},
                                  {"M", "alpha", "M", 1.0}},
                                 start));
}

Agent private_agent(const std::string& id, const std::vector<std::string>& regions) {
  std::vector<test::Row> rows;
  for (const auto& r : regions) rows.emplace_back(r, "own_" + id, r, 1.0);
  return make_agent(id, make_mdp(regions, {}, {"own_" + id}, rows));
}

}  // namespace

TEST(Coupling, ActionSets) {
  auto a = walker("w1", "A");
  EXPECT_EQ(handshake_actions(a.mdp), std::set<std::string>{"alpha"});
  EXPECT_EQ(independent_actions(a.mdp), std::set<std::string>{"step_w1"});
}

TEST(Coupling, PartitionValidation) {
  std::vector<Agent> clash{private_agent("x", {"A"}), private_agent("x2", {"A"})};
  EXPECT_NO_THROW(validate_action_partition(clash));
  clash[1] = make_agent("y", make_mdp({"A"}, {}, {"own_x"}, {{"A", "own_x", "A", 1.0}}));
  EXPECT_THROW(validate_action_partition(clash), ModelError);
  std::vector<Agent> kinds{walker("w1", "A"), make_agent("z", make_mdp({"A"}, {}, {"alpha"}, {{"A", "alpha", "A", 1.0}}))};
  EXPECT_THROW(validate_action_partition(kinds), ModelError);
}

TEST(Coupling, WellPosedAtStepZero) {
  std::vector<Agent> agents{walker("w1", "M"), walker("w2", "M")};
  std::vector<AgentIndex> both{0, 1};
  auto ev = check_handshake_wellposed(agents, both, "alpha", 1);
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->step, 0u);
  EXPECT_EQ(ev->meet_state, "M");
}

TEST(Coupling, DisjointRegionsNeverMeet) {
  auto a = make_agent("p", make_mdp({"X"}, {"alpha"}, {}, {{"X", "alpha", "X", 1.0}}));
  auto b = make_agent("q", make_mdp({"Y"}, {"alpha"}, {}, {{"Y", "alpha", "Y", 1.0}}));
  std::vector<Agent> agents{a, b};
  std::vector<AgentIndex> both{0, 1};
  EXPECT_FALSE(check_handshake_wellposed(agents, both, "alpha", 10));
}

TEST(Coupling, LineGraphMeetingInTheMiddle) {
  auto left = make_agent("l", make_mdp({"L", "M", "R"}, {"alpha"}, {"go_l"},
                                        {{"L", "go_l", "M", 1.0}, {"M", "alpha", "M", 1.0}, {"R", "go_l", "R", 1.0}}));
  auto right = make_agent("r", make_mdp({"L", "M", "R"}, {"alpha"}, {"go_r"},
                                         {{"R", "go_r", "M", 1.0}, {"M", "alpha", "M", 1.0}, {"L", "go_r", "L", 1.0}},
                                         "R"));
  std::vector<Agent> agents{left, right};
  std::vector<AgentIndex> both{0, 1};
  auto ev = check_handshake_wellposed(agents, both, "alpha", 1);
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->step, 1u);
  EXPECT_EQ(ev->meet_state, "M");
  ASSERT_EQ(ev->paths.size(), 2u);
  for (const auto& [agent, path] : ev->paths) {
    EXPECT_EQ(path.length(), 1u);
    EXPECT_TRUE(is_feasible(agents[agent].mdp, path));
  }
}

TEST(Coupling, WellPosedArgumentChecks) {
  std::vector<Agent> agents{walker("w1", "A"), walker("w2", "A"), private_agent("p", {"A"})};
  std::vector<AgentIndex> one{0};
  std::vector<AgentIndex> with_private{0, 2};
  std::vector<AgentIndex> both{0, 1};
  EXPECT_THROW(check_handshake_wellposed(agents, one, "alpha", 3), std::invalid_argument);
  EXPECT_THROW(check_handshake_wellposed(agents, both, "alpha", 0), std::invalid_argument);
  EXPECT_THROW(check_handshake_wellposed(agents, with_private, "alpha", 3), ModelError);
}

TEST(Coupling, DependencyBySharedLabel) {
  std::vector<Agent> agents{walker("w1", "A"), walker("w2", "M"), private_agent("p", {"A", "M"})};
  EXPECT_TRUE(check_dependent(agents, 0, 1));
  EXPECT_FALSE(check_dependent(agents, 0, 2));
  EXPECT_THROW(check_dependent(agents, 1, 1), std::invalid_argument);
}

TEST(Coupling, MeetingRuleRespectsHorizon) {
  std::vector<Agent> agents{walker("w1", "A"), walker("w2", "M")};
  DependencyOptions opt;
  opt.rule = DependencyRule::shared_action_and_meeting;
  opt.horizon = 3;
  EXPECT_TRUE(check_dependent(agents, 0, 1, opt));
  opt.horizon = 2;
  EXPECT_FALSE(check_dependent(agents, 0, 1, opt));
  // The literal rule ignores meetings.
  opt.rule = DependencyRule::shared_action;
  EXPECT_TRUE(check_dependent(agents, 0, 1, opt));
}

TEST(Coupling, DependencyIsSymmetric) {
  std::vector<Agent> agents{walker("w1", "A"), walker("w2", "C"), walker("w3", "M"), private_agent("p", {"A"})};
  DependencyOptions meeting{DependencyRule::shared_action_and_meeting, 2};
  for (AgentIndex i = 0; i < agents.size(); ++i) {
    for (AgentIndex j = 0; j < agents.size(); ++j) {
      if (i == j) continue;
      EXPECT_EQ(check_dependent(agents, i, j), check_dependent(agents, j, i));
      EXPECT_EQ(check_dependent(agents, i, j, meeting), check_dependent(agents, j, i, meeting));
    }
  }
}

TEST(Coupling, ExampleOneGraphAndClusters) {
  auto agents = load_model(COPLAN_MODELS "/example1.json");
  auto g = build_dependency_graph(agents);
  using E = std::pair<AgentIndex, AgentIndex>;
  EXPECT_EQ(g.edges(), (std::vector<E>{{0, 1}, {2, 3}, {3, 4}}));
  auto c = compute_clusters(g);
  EXPECT_EQ(c.clusters, (std::vector<std::vector<AgentIndex>>{{0, 1}, {2, 3, 4}, {5}}));
  EXPECT_EQ(c.cluster_of, (std::vector<std::size_t>{0, 0, 1, 1, 1, 2}));
  EXPECT_TRUE(c.independent(5));
  EXPECT_FALSE(c.independent(3));
}

TEST(Coupling, NoSharedActionsGiveSingletons) {
  std::vector<Agent> agents{private_agent("a", {"A"}), private_agent("b", {"A"}), private_agent("c", {"A"})};
  auto g = build_dependency_graph(agents);
  EXPECT_TRUE(g.edges().empty());
  auto c = compute_clusters(g);
  EXPECT_EQ(c.size(), 3u);
  auto warnings = coupling_warnings(agents, c);
  ASSERT_FALSE(warnings.empty());
}

TEST(Coupling, SharedByAllGivesCompleteGraph) {
  std::vector<Agent> agents{walker("w1", "A"), walker("w2", "B"), walker("w3", "C"), walker("w4", "M")};
  auto g = build_dependency_graph(agents);
  EXPECT_EQ(g.edges().size(), 6u);
  EXPECT_EQ(compute_clusters(g).size(), 1u);
}

TEST(Coupling, ClustersMatchTransitiveClosure) {
  std::mt19937_64 rng(42);
  std::bernoulli_distribution edge(0.25);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    DependencyGraph g(n);
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      reach[i][i] = true;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (edge(rng)) {
          g.add_edge(static_cast<AgentIndex>(i), static_cast<AgentIndex>(j));
          reach[i][j] = reach[j][i] = true;
        }
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
      }
    }
    auto c = compute_clusters(g);
    std::size_t total = 0;
    for (const auto& members : c.clusters) total += members.size();
    EXPECT_EQ(total, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(c.cluster_of[i] == c.cluster_of[j], reach[i][j]);
    }
    for (std::size_t k = 1; k < c.size(); ++k) EXPECT_LT(c.clusters[k - 1].front(), c.clusters[k].front());
  }
}

TEST(Coupling, StateCountsForExampleOne) {
  Clustering c;
  c.clusters = {{0, 1}, {2, 3, 4}, {5}};
  c.cluster_of = {0, 0, 1, 1, 1, 2};
  auto r = estimate_state_counts(c, 4);
  ASSERT_EQ(r.clusters.size(), 3u);
  EXPECT_EQ(*r.clusters[0].exact, 16u);
  EXPECT_EQ(*r.clusters[1].exact, 64u);
  EXPECT_EQ(*r.clusters[2].exact, 4u);
  EXPECT_EQ(*r.centralized.exact, 4096u);
  EXPECT_TRUE(r.ordering_holds);
  EXPECT_TRUE(r.strictly_smaller);
}

TEST(Coupling, StateCountEdgeCases) {
  Clustering single;
  single.clusters = {{0, 1, 2}};
  single.cluster_of = {0, 0, 0};
  auto all = estimate_state_counts(single, 5);
  EXPECT_EQ(*all.clusters[0].exact, *all.centralized.exact);
  EXPECT_TRUE(all.ordering_holds);
  EXPECT_FALSE(all.strictly_smaller);

  Clustering alone;
  alone.clusters = {{0}};
  alone.cluster_of = {0};
  EXPECT_EQ(*estimate_state_counts(alone, 7).clusters[0].exact, 7u);

  Clustering big;
  for (AgentIndex i = 0; i < 40; ++i) {
    big.clusters.push_back({i});
    big.cluster_of.push_back(i);
  }
  auto huge = estimate_state_counts(big, 1000);
  EXPECT_FALSE(huge.centralized.exact);
  EXPECT_NEAR(huge.centralized.log10, 120.0, 1e-9);
  EXPECT_TRUE(huge.strictly_smaller);
}
