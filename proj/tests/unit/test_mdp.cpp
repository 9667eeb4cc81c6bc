#include "helpers.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace coplan;
using coplan::test::act;
using coplan::test::make_mdp;
using coplan::test::st;

namespace {

Mdp two_action_model() {
  return make_mdp({"s0", "s1", "s2"}, {}, {"a", "b"},
                  {{"s0", "a", "s1", 0.8}, {"s0", "a", "s2", 0.2}, {"s0", "b", "s0", 1.0},
                   {"s1", "a", "s1", 1.0}, {"s2", "b", "s2", 1.0}});
}

}  // namespace

TEST(Mdp, SelfLoopIsValid) {
  auto m = make_mdp({"s0"}, {}, {"a"}, {{"s0", "a", "s0", 1.0}});
  EXPECT_EQ(m.num_states(), 1u);
  EXPECT_EQ(m.num_choices(), 1u);
  EXPECT_EQ(m.initial(), 0u);
}

TEST(Mdp, RejectsRowSumAndNamesTheRow) {
  try {
    make_mdp({"s0", "s1", "s2"}, {}, {"a"},
             {{"s0", "a", "s1", 0.6}, {"s0", "a", "s2", 0.3}, {"s1", "a", "s1", 1.0}, {"s2", "a", "s2", 1.0}});
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find("row (s0, a)"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("0.9"), std::string::npos) << e.what();
  }
}

TEST(Mdp, RejectsDeadlockDuplicatesAndUnknownLabels) {
  EXPECT_THROW(make_mdp({"s0", "s1"}, {}, {"a"}, {{"s0", "a", "s1", 1.0}}), ModelError);
  EXPECT_THROW(make_mdp({"s0", "s0"}, {}, {"a"}, {{"s0", "a", "s0", 1.0}}), ModelError);
  EXPECT_THROW(make_mdp({"s0"}, {}, {"a", "a"}, {{"s0", "a", "s0", 1.0}}), ModelError);
  EXPECT_THROW(make_mdp({"s0"}, {}, {"a"}, {{"s0", "b", "s0", 1.0}}), ModelError);
  EXPECT_THROW(make_mdp({"s0"}, {}, {"a"}, {{"s0", "a", "s9", 1.0}}), ModelError);
  EXPECT_THROW(make_mdp({"s0"}, {}, {"a"}, {{"s0", "a", "s0", 0.5}, {"s0", "a", "s0", 0.5}}), ModelError);
  EXPECT_THROW(make_mdp({"s0"}, {}, {"a"}, {{"s0", "a", "s0", 1.5}}), ModelError);
  EXPECT_THROW(make_mdp({"s0"}, {}, {"a"}, {{"s0", "a", "s0", 1.0}}, "nowhere"), ModelError);
}

TEST(Mdp, ZeroProbabilityEntriesAreDropped) {
  auto m = make_mdp({"s0", "s1"}, {}, {"a"}, {{"s0", "a", "s0", 1.0}, {"s0", "a", "s1", 0.0}, {"s1", "a", "s1", 1.0}});
  EXPECT_EQ(post_states(m, 0, 0), std::vector<StateIndex>{0});
}

TEST(Mdp, AvailableActions) {
  auto m = two_action_model();
  EXPECT_EQ(available_actions(m, st(m, "s0")), (std::vector<ActionIndex>{act(m, "a"), act(m, "b")}));
  EXPECT_EQ(available_actions(m, st(m, "s1")), std::vector<ActionIndex>{act(m, "a")});
  for (StateIndex s = 0; s < m.num_states(); ++s) EXPECT_FALSE(available_actions(m, s).empty());
}

TEST(Mdp, PostStates) {
  auto m = two_action_model();
  EXPECT_EQ(post_states(m, st(m, "s0"), act(m, "a")), (std::vector<StateIndex>{st(m, "s1"), st(m, "s2")}));
  EXPECT_EQ(post_states(m, st(m, "s0"), act(m, "b")), std::vector<StateIndex>{st(m, "s0")});
  EXPECT_THROW(post_states(m, st(m, "s1"), act(m, "b")), ModelError);
}

TEST(Mdp, TransitionMatrixLayout) {
  auto m = make_mdp({"s0", "s1"}, {}, {"a", "b"},
                    {{"s0", "a", "s1", 1.0}, {"s0", "b", "s0", 1.0}, {"s1", "a", "s0", 0.5}, {"s1", "a", "s1", 0.5},
                     {"s1", "b", "s1", 1.0}});
  auto t = transition_matrix(m);
  ASSERT_EQ(t.rows, 4u);
  ASSERT_EQ(t.cols, 2u);
  EXPECT_EQ(t.row_keys[2], (std::pair<StateIndex, ActionIndex>{1, 0}));
  EXPECT_DOUBLE_EQ(t.at(2, 0), 0.5);
  for (std::size_t r = 0; r < t.rows; ++r) EXPECT_NEAR(t.at(r, 0) + t.at(r, 1), 1.0, 1e-12);

  auto one = transition_matrix(make_mdp({"s0"}, {}, {"a"}, {{"s0", "a", "s0", 1.0}}));
  EXPECT_EQ(one.rows, 1u);
  EXPECT_EQ(one.values, std::vector<double>{1.0});
}

TEST(Mdp, InduceDtmcCopiesRows) {
  auto m = two_action_model();
  StationaryPolicy pol{{act(m, "a"), act(m, "a"), act(m, "b")}};
  auto d = induce_dtmc(m, pol);
  EXPECT_EQ(d.num_states(), m.num_states());
  EXPECT_EQ(d.initial(), m.initial());
  EXPECT_DOUBLE_EQ(d.probability(0, st(m, "s1")), 0.8);
  EXPECT_DOUBLE_EQ(d.probability(0, st(m, "s2")), 0.2);
  EXPECT_THROW(induce_dtmc(m, StationaryPolicy{{act(m, "a"), act(m, "b"), act(m, "b")}}), ModelError);
  EXPECT_THROW(induce_dtmc(m, StationaryPolicy{{act(m, "a")}}), ModelError);
}

TEST(Mdp, FinitePathProbability) {
  Dtmc d({"s0", "s1", "s2"}, 0,
         {Distribution({{1, 0.5}, {0, 0.5}}), Distribution({{2, 0.4}, {1, 0.6}}), Distribution({{2, 1.0}})});
  const std::vector<StateIndex> single{0};
  const std::vector<StateIndex> path{0, 1, 2};
  const std::vector<StateIndex> impossible{0, 2};
  EXPECT_DOUBLE_EQ(finite_path_probability(d, single), 1.0);
  EXPECT_NEAR(finite_path_probability(d, path), 0.2, 1e-15);
  EXPECT_EQ(finite_path_probability(d, impossible), 0.0);
}

TEST(Mdp, CylinderSetsSumToOne) {
  Dtmc d({"s0", "s1", "s2"}, 0,
         {Distribution({{1, 0.5}, {0, 0.3}, {2, 0.2}}), Distribution({{2, 0.4}, {1, 0.6}}), Distribution({{0, 1.0}})});
  for (std::size_t len = 1; len <= 5; ++len) {
    double total = 0.0;
    std::vector<StateIndex> path{0};
    std::function<void()> extend = [&] {
      if (path.size() == len) {
        total += finite_path_probability(d, path);
        return;
      }
      for (StateIndex t = 0; t < 3; ++t) {
        path.push_back(t);
        extend();
        path.pop_back();
      }
    };
    extend();
    EXPECT_NEAR(total, 1.0, 1e-12) << "length " << len;
  }
}

TEST(Mdp, FeasibilityAndReachability) {
  auto m = two_action_model();
  EXPECT_TRUE(is_feasible(m, FinitePath{{0, 1, 1}, {}}));
  EXPECT_TRUE(is_feasible(m, FinitePath{{0, 2}, {act(m, "a")}}));
  EXPECT_FALSE(is_feasible(m, FinitePath{{0, 2}, {act(m, "b")}}));
  EXPECT_FALSE(is_feasible(m, FinitePath{{1, 0}, {}}));
  auto r = reachable_states(m, st(m, "s1"));
  EXPECT_EQ(r, (std::vector<bool>{false, true, false}));
}

TEST(Mdp, AsMdpRoundTrip) {
  Dtmc d({"x", "y"}, 1, {Distribution({{1, 1.0}}), Distribution({{0, 0.25}, {1, 0.75}})});
  auto m = as_mdp(d);
  EXPECT_EQ(m.num_actions(), 1u);
  EXPECT_EQ(m.initial(), 1u);
  auto back = induce_dtmc(m, StationaryPolicy{{0, 0}});
  EXPECT_EQ(back.row(1), d.row(1));
}
