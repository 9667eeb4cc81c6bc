#include "commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coplan;
using namespace coplan::cli;

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("coplan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  std::ostringstream out;
  std::ostringstream err;

private:
  fs::path dir_;
};

std::string slurp(const std::string& p) { return read_text_file(p); }

}  // namespace

TEST_F(Cli, ValidateCorpus) {
  EXPECT_EQ(cmd_validate(COPLAN_MODELS "/example1.json", out, err), kSuccess) << err.str();
  EXPECT_EQ(cmd_validate(COPLAN_MODELS "/rendezvous.json", out, err), kSuccess) << err.str();
}

TEST_F(Cli, ValidateRejectsBadInput) {
  auto model = slurp(COPLAN_MODELS "/coin.json");
  auto bad_row = model;
  bad_row.replace(bad_row.find("0.5"), 3, "0.4");
  EXPECT_EQ(cmd_validate(write("row.json", bad_row), out, err), kInvalidInput);
  EXPECT_NE(err.str().find("row ("), std::string::npos) << err.str();

  err.str("");
  auto bad_formula = model;
  bad_formula.replace(bad_formula.find("P>="), 3, "P=>");
  EXPECT_EQ(cmd_validate(write("formula.json", bad_formula), out, err), kInvalidInput);
  EXPECT_NE(err.str().find("formula"), std::string::npos) << err.str();

  EXPECT_EQ(cmd_validate(path("missing.json"), out, err), kInvalidInput);
}

TEST_F(Cli, ClusterReport) {
  ClusterOptions opt;
  opt.model = COPLAN_MODELS "/example1.json";
  ASSERT_EQ(cmd_cluster(opt, out, err), kSuccess) << err.str();
  const auto text = out.str();
  EXPECT_NE(text.find("edges: {1,2} {3,4} {4,5}"), std::string::npos) << text;
  EXPECT_NE(text.find("clusters: 3"), std::string::npos) << text;
  EXPECT_NE(text.find("C1 = {1,2}"), std::string::npos) << text;
  EXPECT_NE(text.find("C2 = {3,4,5}"), std::string::npos) << text;
  EXPECT_NE(text.find("C3 = {6}"), std::string::npos) << text;
  EXPECT_NE(text.find("product states: C1=16 C2=64 C3=4  centralized=4096"), std::string::npos) << text;
}

TEST_F(Cli, SynthesizeExitCodes) {
  SynthesizeOptions opt;
  opt.model = COPLAN_MODELS "/rendezvous.json";
  opt.out = path("policy.json");
  EXPECT_EQ(cmd_synthesize(opt, out, err), kSuccess) << err.str();
  EXPECT_TRUE(fs::exists(*opt.out));
  auto policy = load_policy(*opt.out);
  EXPECT_EQ(policy.clusters.size(), 1u);

  opt.out.reset();
  opt.max_policies = 1;
  EXPECT_EQ(cmd_synthesize(opt, out, err), kInconclusive);

  opt.max_policies = 100'000;
  opt.model = COPLAN_TEST_DATA "/lossy.json";
  EXPECT_EQ(cmd_synthesize(opt, out, err), kNoSolution);
  opt.model = COPLAN_TEST_DATA "/apart.json";
  EXPECT_EQ(cmd_synthesize(opt, out, err), kNoSolution);

  opt.model = COPLAN_MODELS "/coin.json";
  opt.mode = "whenever";
  EXPECT_EQ(cmd_synthesize(opt, out, err), kInvalidInput);
}

TEST_F(Cli, SimulateFromSynthesizedPolicy) {
  SynthesizeOptions syn;
  syn.model = COPLAN_MODELS "/coin.json";
  syn.out = path("coin_policy.json");
  ASSERT_EQ(cmd_synthesize(syn, out, err), kSuccess) << err.str();

  SimulateOptions sim;
  sim.model = syn.model;
  sim.policy = *syn.out;
  sim.trials = 2000;
  sim.seed = 1;
  sim.trace = path("trace.tsv");
  out.str("");
  EXPECT_EQ(cmd_simulate(sim, out, err), kSuccess) << err.str();
  EXPECT_FALSE(out.str().empty());
  EXPECT_EQ(slurp(*sim.trace).rfind("# cluster 1\n0\t", 0), 0u);

  std::ostringstream again;
  EXPECT_EQ(cmd_simulate(sim, again, err), kSuccess);
  EXPECT_EQ(again.str(), out.str());

  sim.model = COPLAN_MODELS "/rendezvous.json";
  EXPECT_EQ(cmd_simulate(sim, out, err), kInvalidInput);
}

TEST_F(Cli, ProductCommand) {
  ProductCommandOptions opt;
  opt.model = COPLAN_MODELS "/example1.json";
  opt.cluster = 1;
  opt.out = path("product.json");
  EXPECT_EQ(cmd_product(opt, out, err), kSuccess) << err.str();
  auto single = load_model(*opt.out);
  ASSERT_EQ(single.size(), 1u);
  opt.cluster = 9;
  EXPECT_EQ(cmd_product(opt, out, err), kInvalidInput);
}

TEST(CliFormat, Probability) {
  EXPECT_EQ(format_probability(0.75), "0.75");
  EXPECT_EQ(format_probability(1.0 / 3.0), "0.333333333333");
}
