#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace coplan::cli;

  CLI::App app{"coplan: policy synthesis for multi-agent MDPs with handshaking actions"};
  app.require_subcommand(1);

  std::string validate_model;
  auto* validate = app.add_subcommand("validate", "Check a model file and its formulas");
  validate->add_option("model", validate_model, "Model file (JSON)")->required();

  ClusterOptions cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "Print the dependency graph, clusters and state counts");
  cluster_cmd->add_option("model", cluster.model, "Model file (JSON)")->required();
  cluster_cmd->add_option("--horizon", cluster.horizon, "Step horizon for meeting checks")->check(CLI::PositiveNumber);
  cluster_cmd->add_flag("--require-meeting", cluster.require_meeting,
                        "Only count shared handshakes whose sharers can meet within the horizon");

  SynthesizeOptions synth;
  synth.jobs = default_jobs();
  auto* synth_cmd = app.add_subcommand("synthesize", "Synthesize per-agent policies");
  synth_cmd->add_option("model", synth.model, "Model file (JSON)")->required();
  synth_cmd->add_option("--mode", synth.mode, "Threshold reading")
      ->check(CLI::IsMember({"existential", "universal"}))
      ->capture_default_str();
  synth_cmd->add_option("--epsilon", synth.epsilon, "Value-iteration tolerance")->capture_default_str();
  synth_cmd->add_option("--max-policies", synth.max_policies, "Candidate policies per cluster")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Policy file to write");
  synth_cmd->add_option("--jobs", synth.jobs, "Clusters solved concurrently (default: $COPLAN_JOBS or 1)");
  synth_cmd->add_flag("--strict", synth.strict, "Check handshake success on every product state");
  synth_cmd->add_option("--horizon", synth.horizon, "Step horizon for meeting checks")->check(CLI::PositiveNumber);
  synth_cmd->add_flag("--require-meeting", synth.require_meeting,
                      "Only count shared handshakes whose sharers can meet within the horizon");

  SimulateOptions sim;
  sim.jobs = default_jobs();
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo check of a policy file");
  sim_cmd->add_option("model", sim.model, "Model file (JSON)")->required();
  sim_cmd->add_option("policy", sim.policy, "Policy file (JSON)")->required();
  sim_cmd->add_option("--trials", sim.trials, "Sampled paths per formula")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Generator seed")->capture_default_str();
  sim_cmd->add_option("--max-steps", sim.max_steps, "Truncation horizon")->capture_default_str();
  sim_cmd->add_option("--trace", sim.trace, "Write one sampled trace per cluster to this file");
  sim_cmd->add_option("--jobs", sim.jobs, "Worker threads (default: $COPLAN_JOBS or 1)");

  ProductCommandOptions product;
  auto* product_cmd = app.add_subcommand("product", "Export the product MDP of one cluster");
  product_cmd->add_option("model", product.model, "Model file (JSON)")->required();
  product_cmd->add_option("--cluster", product.cluster, "1-based cluster index")->capture_default_str();
  product_cmd->add_flag("!--no-prune", product.prune, "Keep unreachable joint states");
  product_cmd->add_option("--out", product.out, "Write the product model here instead of stdout");
  product_cmd->add_option("--horizon", product.horizon, "Step horizon for meeting checks")
      ->check(CLI::PositiveNumber);
  product_cmd->add_flag("--require-meeting", product.require_meeting,
                        "Only count shared handshakes whose sharers can meet within the horizon");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  if (*validate) return cmd_validate(validate_model, std::cout, std::cerr);
  if (*cluster_cmd) return cmd_cluster(cluster, std::cout, std::cerr);
  if (*synth_cmd) return cmd_synthesize(synth, std::cout, std::cerr);
  if (*sim_cmd) return cmd_simulate(sim, std::cout, std::cerr);
  if (*product_cmd) return cmd_product(product, std::cout, std::cerr);
  return kInvalidInput;
}
