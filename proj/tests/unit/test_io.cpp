#include <coplan/io.hpp>

#include <gtest/gtest.h>

using namespace coplan;

namespace {

const char* kSmall = R"({
  "agents": [
    {
      "id": "solo",
      "states": ["A", "B"],
      "initial": "A",
      "handshake_actions": [],
      "independent_actions": ["go"],
      "transitions": [
        {"from": "A", "action": "go", "to": "B", "prob": 0.25},
        {"from": "A", "action": "go", "to": "A", "prob": 0.75},
        {"from": "B", "action": "go", "to": "B", "prob": 1}
      ],
      "formula": "P>=0.5 [ F go ]"
    }
  ]
})";

std::string message_of(const std::string& json) {
  try {
    parse_model(json);
  } catch (const std::runtime_error& e) {
    return e.what();
  }
  return {};
}

std::string with(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

}  // namespace

TEST(Io, ParsesSmallModel) {
  auto agents = parse_model(kSmall);
  ASSERT_EQ(agents.size(), 1u);
  EXPECT_EQ(agents[0].id, "solo");
  EXPECT_EQ(agents[0].mdp.num_states(), 2u);
  EXPECT_EQ(agents[0].formula_text, "P>=0.5 [ F go ]");
  ASSERT_TRUE(agents[0].formula);
  EXPECT_DOUBLE_EQ(agents[0].mdp.choices(0)[0].distribution.probability(1), 0.25);
}

TEST(Io, ModelRoundTrip) {
  for (const char* path : {COPLAN_MODELS "/example1.json", COPLAN_MODELS "/rendezvous.json",
                           COPLAN_MODELS "/coin.json", COPLAN_TEST_DATA "/lossy.json", COPLAN_TEST_DATA "/apart.json"}) {
    auto agents = load_model(path);
    auto again = parse_model(write_model(agents));
    ASSERT_EQ(again.size(), agents.size()) << path;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      EXPECT_EQ(again[i].id, agents[i].id);
      EXPECT_EQ(again[i].mdp, agents[i].mdp) << path << " agent " << agents[i].id;
      EXPECT_EQ(again[i].formula_text, agents[i].formula_text);
    }
    EXPECT_EQ(write_model(again), write_model(agents));
  }
}

TEST(Io, ErrorsNameAgentAndField) {
  EXPECT_THROW(parse_model("{"), FormatError);
  EXPECT_THROW(parse_model("[]"), FormatError);
  EXPECT_THROW(parse_model(R"({"agents": []})"), FormatError);

  auto missing = message_of(with(kSmall, R"("initial": "A",)", ""));
  EXPECT_NE(missing.find("agents[0] ('solo')"), std::string::npos) << missing;
  EXPECT_NE(missing.find("initial"), std::string::npos) << missing;

  EXPECT_THROW(parse_model(with(kSmall, R"("prob": 0.25)", R"("prob": "0.25")")), FormatError);

  auto bad_row = with(kSmall, R"("prob": 0.25)", R"("prob": 0.2)");
  EXPECT_THROW(parse_model(bad_row), ModelError);
  auto row_msg = message_of(bad_row);
  EXPECT_NE(row_msg.find("solo"), std::string::npos) << row_msg;
  EXPECT_NE(row_msg.find("row (A, go)"), std::string::npos) << row_msg;

  auto bad_formula = with(kSmall, "P>=0.5 [ F go ]", "P>=0.5 [ F go");
  EXPECT_THROW(parse_model(bad_formula), ParseError);
  EXPECT_NE(message_of(bad_formula).find("solo"), std::string::npos);
}

TEST(Io, DuplicateAgentIds) {
  auto agents = parse_model(kSmall);
  std::vector<Agent> twice{agents[0], agents[0]};
  EXPECT_THROW(parse_model(write_model(twice)), FormatError);
}

TEST(Io, MissingFile) { EXPECT_THROW(load_model("/nonexistent/model.json"), FormatError); }

TEST(Io, ThresholdModeNames) {
  EXPECT_EQ(to_string(ThresholdMode::existential), "existential");
  EXPECT_EQ(parse_threshold_mode("universal"), ThresholdMode::universal);
  EXPECT_THROW(parse_threshold_mode("sometimes"), FormatError);
}

TEST(Io, PolicyRoundTrip) {
  auto agents = load_model(COPLAN_MODELS "/example1.json");
  SolveConfig cfg;
  auto bundle = solve_problem1(agents, cfg);
  ASSERT_EQ(bundle.status, SolveStatus::solved);
  auto file = make_policy_file(bundle, agents, cfg);
  EXPECT_EQ(file.mode, "existential");
  EXPECT_EQ(file.clusters.size(), bundle.clusters.size());
  EXPECT_EQ(file.agents.size(), agents.size());
  auto text = write_policy(file);
  auto back = parse_policy(text);
  EXPECT_EQ(back, file);
  EXPECT_EQ(write_policy(back), text);
  for (std::size_t c = 0; c < bundle.clusters.size(); ++c) {
    EXPECT_EQ(team_policy_from_file(back.clusters[c], *bundle.clusters[c].product), *bundle.clusters[c].policy);
  }
}

TEST(Io, PolicyErrors) {
  EXPECT_THROW(parse_policy("{}"), FormatError);
  EXPECT_THROW(parse_policy("not json"), FormatError);

  auto agents = load_model(COPLAN_MODELS "/coin.json");
  auto bundle = solve_problem1(agents);
  ASSERT_EQ(bundle.status, SolveStatus::solved);
  auto file = make_policy_file(bundle, agents, SolveConfig{});
  auto cluster = file.clusters[0];
  cluster.rows[0].state = "nowhere";
  EXPECT_THROW(team_policy_from_file(cluster, *bundle.clusters[0].product), FormatError);
  cluster = file.clusters[0];
  cluster.rows[0].action = "nothing";
  EXPECT_THROW(team_policy_from_file(cluster, *bundle.clusters[0].product), FormatError);

  auto lossy = load_model(COPLAN_TEST_DATA "/lossy.json");
  EXPECT_THROW(make_policy_file(solve_problem1(lossy), lossy, SolveConfig{}), std::logic_error);
}

TEST(Io, ProductModelFile) {
  auto agents = load_model(COPLAN_MODELS "/rendezvous.json");
  std::vector<AgentIndex> both{0, 1};
  auto p = build_product(agents, both);
  auto single = parse_model(write_product_model(p, agents, "team"));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].id, "team");
  EXPECT_EQ(single[0].mdp.num_states(), p.model().num_states());
  EXPECT_TRUE(pctl::equal(single[0].formula, mutual_formula(agents, both)));
}
