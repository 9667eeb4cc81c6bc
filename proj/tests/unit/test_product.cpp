#include "helpers.hpp"
#include "oracle.hpp"

#include <coplan/io.hpp>
#include <coplan/product.hpp>

#include <gtest/gtest.h>

#include <map>

using namespace coplan;
using coplan::test::make_agent;
using coplan::test::make_mdp;

namespace {

Agent coin_agent(const std::string& id, const std::string& formula = {}) {
  const std::string own = "m" + id;
  return make_agent(id, make_mdp({"s0", "s1"}, {"h"}, {own},
                                 {{"s0", "h", "s1", 0.9}, {"s0", "h", "s0", 0.1}, {"s0", own, "s0", 1.0},
                                  {"s1", own, "s0", 1.0}}),
                    formula);
}

Agent idler(const std::string& id) {
  return make_agent(id, make_mdp({"z0"}, {}, {"m" + id}, {{"z0", "m" + id, "z0", 1.0}}));
}

std::size_t choice_pos(const Mdp& m, StateIndex s, const std::string& action) {
  const Choice* c = m.find_choice(s, *m.find_action(action));
  if (!c) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(c - m.choices(s).data());
}

std::map<std::string, double> row_by_label(const Mdp& m, StateIndex s, const std::string& action) {
  std::map<std::string, double> out;
  for (const auto& t : m.find_choice(s, *m.find_action(action))->distribution.entries()) {
    out[m.state_label(t.target)] = t.probability;
  }
  return out;
}

// Every product row projects onto the local row for movers and onto a point
// mass for non-movers.
void expect_marginals(std::span<const Agent> agents, const ProductMdp& p) {
  const Mdp& m = p.model();
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    const auto choices = m.choices(s);
    for (std::size_t c = 0; c < choices.size(); ++c) {
      EXPECT_NEAR(choices[c].distribution.total(), 1.0, 1e-12);
      for (std::size_t j = 0; j < p.arity(); ++j) {
        std::map<StateIndex, double> marginal;
        for (const auto& t : choices[c].distribution.entries()) marginal[p.component(t.target, j)] += t.probability;
        const StateIndex here = p.component(s, j);
        if (p.movers(s, c) >> j & 1u) {
          const Mdp& local = agents[p.members()[j]].mdp;
          auto la = p.local_action(choices[c].action, j);
          ASSERT_TRUE(la);
          const Choice* lc = local.find_choice(here, *la);
          ASSERT_NE(lc, nullptr);
          ASSERT_EQ(marginal.size(), lc->distribution.size());
          for (const auto& t : lc->distribution.entries()) EXPECT_NEAR(marginal[t.target], t.probability, 1e-12);
        } else {
          ASSERT_EQ(marginal.size(), 1u);
          EXPECT_EQ(marginal.begin()->first, here);
        }
      }
    }
  }
}

}  // namespace

TEST(Product, FullSynchronisationMultiplies) {
  std::vector<Agent> agents{coin_agent("x"), coin_agent("y")};
  std::vector<AgentIndex> both{0, 1};
  auto p = build_product(agents, both);
  const Mdp& m = p.model();
  const StateIndex s = *m.find_state("(s0|s0)");
  EXPECT_EQ(m.initial(), s);
  auto row = row_by_label(m, s, "h");
  EXPECT_NEAR(row["(s1|s1)"], 0.81, 1e-12);
  EXPECT_NEAR(row["(s1|s0)"], 0.09, 1e-12);
  EXPECT_NEAR(row["(s0|s1)"], 0.09, 1e-12);
  EXPECT_NEAR(row["(s0|s0)"], 0.01, 1e-12);
  EXPECT_TRUE(p.is_full_row(s, choice_pos(m, s, "h")));
}

TEST(Product, PrivateActionsMoveOneMember) {
  std::vector<Agent> agents{coin_agent("x"), coin_agent("y")};
  std::vector<AgentIndex> both{0, 1};
  auto p = build_product(agents, both);
  const Mdp& m = p.model();
  const StateIndex s = *m.find_state("(s1|s1)");
  EXPECT_EQ(row_by_label(m, s, "mx"), (std::map<std::string, double>{{"(s0|s1)", 1.0}}));
  EXPECT_EQ(p.movers(s, choice_pos(m, s, "mx")), MoverMask{1});
  EXPECT_EQ(p.movers(s, choice_pos(m, s, "my")), MoverMask{2});
  EXPECT_FALSE(p.is_full_row(s, choice_pos(m, s, "my")));
}

TEST(Product, HandshakeBlockedWithoutEverySharer) {
  std::vector<Agent> agents{coin_agent("x"), coin_agent("y")};
  std::vector<AgentIndex> both{0, 1};
  auto p = build_product(agents, both);
  const Mdp& m = p.model();
  const StateIndex s = *m.find_state("(s1|s0)");
  EXPECT_FALSE(m.is_available(s, *m.find_action("h")));
  EXPECT_EQ(m.choices(s).size(), 2u);
}

TEST(Product, PartialRowForSubsetOfCluster) {
  std::vector<Agent> agents{coin_agent("x"), coin_agent("y"), idler("z")};
  std::vector<AgentIndex> all{0, 1, 2};
  auto p = build_product(agents, all);
  const Mdp& m = p.model();
  const StateIndex s = *m.find_state("(s0|s0|z0)");
  EXPECT_EQ(p.movers(s, choice_pos(m, s, "h")), MoverMask{3});
  EXPECT_EQ(p.sharers(*m.find_action("h")), MoverMask{3});
  EXPECT_EQ(p.all_members(), MoverMask{7});
  EXPECT_NEAR(row_by_label(m, s, "h")["(s1|s1|z0)"], 0.81, 1e-12);
  expect_marginals(agents, p);
}

TEST(Product, SingletonEqualsAgent) {
  std::vector<Agent> agents{coin_agent("x"), coin_agent("y")};
  std::vector<AgentIndex> one{1};
  auto p = build_product(agents, one);
  EXPECT_EQ(p.model(), agents[1].mdp);
  EXPECT_EQ(p.arity(), 1u);
}

TEST(Product, PruningKeepsReachableStates) {
  std::vector<Agent> agents{coin_agent("x"), idler("z")};
  std::vector<AgentIndex> both{0, 1};
  auto pruned = build_product(agents, both);
  EXPECT_EQ(pruned.full_state_count(), 2u);
  EXPECT_EQ(pruned.model().num_states(), 2u);
  // h needs x's sharers only, so it fires here as a partial row.
  auto full = build_product(agents, both, ProductOptions{false});
  EXPECT_EQ(full.model().num_states(), 2u);
}

TEST(Product, ExampleOneMarginals) {
  auto agents = load_model(COPLAN_MODELS "/example1.json");
  auto c = compute_clusters(build_dependency_graph(agents));
  for (const auto& members : c.clusters) {
    auto p = build_product(agents, members);
    EXPECT_EQ(p.members(), members);
    expect_marginals(agents, p);
  }
}

TEST(Product, RandomProductsAreStochastic) {
  std::mt19937_64 rng(7);
  oracle::RandomMdpOptions opt;
  opt.max_states = 3;
  opt.num_actions = 2;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Agent> agents;
    for (int i = 0; i < 2; ++i) {
      Mdp local = oracle::random_mdp(rng, opt);
      RawMdp raw;
      for (auto l : local.state_labels()) raw.states.push_back(std::string(l));
      raw.initial = raw.states.front();
      const std::string own = "p" + std::to_string(i);
      raw.actions = {{"h", ActionKind::handshake}, {own, ActionKind::independent}};
      for (StateIndex s = 0; s < local.num_states(); ++s) {
        for (const auto& ch : local.choices(s)) {
          const std::string label = ch.action == 0 ? "h" : own;
          for (const auto& t : ch.distribution.entries()) {
            raw.transitions.push_back({raw.states[s], label, raw.states[t.target], t.probability});
          }
        }
        if (!local.is_available(s, 1)) raw.transitions.push_back({raw.states[s], own, raw.states[s], 1.0});
      }
      agents.push_back(make_agent("r" + std::to_string(i), build_mdp(raw)));
    }
    std::vector<AgentIndex> both{0, 1};
    auto p = build_product(agents, both);
    expect_marginals(agents, p);
  }
}

TEST(Product, MutualFormula) {
  std::vector<Agent> agents{coin_agent("x", "P>=0.5 [ F h ]"), idler("z"), coin_agent("y", "P>=0.2 [ X my ]")};
  std::vector<AgentIndex> xy{0, 2};
  EXPECT_EQ(pctl::to_string(mutual_formula(agents, xy)), "(P>=0.5 [ true U h ] & P>=0.2 [ X my ])");
  std::vector<AgentIndex> z{1};
  EXPECT_EQ(pctl::to_string(mutual_formula(agents, z)), "true");
  agents[0] = coin_agent("x", "P>=0.5 [ F my ]");
  std::vector<AgentIndex> x{0};
  EXPECT_THROW(mutual_formula(agents, x), ModelError);
}

TEST(Product, HandshakeEnabledStates) {
  std::vector<Agent> agents{coin_agent("x"), coin_agent("y")};
  std::vector<AgentIndex> both{0, 1};
  auto p = build_product(agents, both);
  auto states = handshake_enabled_states(p, "h");
  ASSERT_EQ(states.size(), 1u);
  EXPECT_EQ(p.model().state_label(states[0]), "(s0|s0)");
  EXPECT_THROW(handshake_enabled_states(p, "mx"), ModelError);
  EXPECT_TRUE(sharers_colocated(p, states[0], 3));
  EXPECT_FALSE(sharers_colocated(p, *p.model().find_state("(s1|s0)"), 3));
  EXPECT_EQ(mask_members(p, 2), std::vector<AgentIndex>{1});
}

TEST(Product, RejectsEmptyCluster) {
  std::vector<Agent> agents{coin_agent("x")};
  std::vector<AgentIndex> none;
  EXPECT_THROW(build_product(agents, none), ProductError);
}
