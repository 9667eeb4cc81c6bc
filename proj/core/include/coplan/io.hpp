#pragma once

// JSON model and policy files. Schemas: docs/model.schema.json and
// docs/policy.schema.json.

#include <coplan/coupling.hpp>
#include <coplan/policy.hpp>
#include <coplan/product.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace coplan {

/// Parses a model file. Errors carry the offending agent and field:
/// FormatError for malformed JSON or schema violations, ModelError for
/// invalid MDPs, ParseError for formulas.
std::vector<Agent> parse_model(std::string_view json);
std::vector<Agent> load_model(const std::filesystem::path& path);

/// Serializes agents in the model file format.
std::string write_model(std::span<const Agent> agents);

/// The cluster product as a single-agent model file (one agent named
/// `id`, carrying the mutual formula).
std::string write_product_model(const ProductMdp& p, std::span<const Agent> agents, const std::string& id);

struct TeamRow {
  std::string state;
  std::string action;

  friend bool operator==(const TeamRow&, const TeamRow&) = default;
};

struct ClusterPolicy {
  std::size_t index = 0;
  std::vector<std::string> members;  // agent ids
  std::vector<TeamRow> rows;         // product state -> action, in state order
  std::size_t policies_checked = 0;
  std::vector<StateIndex> relaxed;
  std::vector<FormulaReport> reports;

  friend bool operator==(const ClusterPolicy&, const ClusterPolicy&) = default;
};

struct PolicyFile {
  std::string mode;  // "existential" or "universal"
  double epsilon = 0.0;
  double tie_tolerance = 0.0;
  std::size_t max_policies = 0;
  std::vector<ClusterPolicy> clusters;
  std::vector<AgentPolicy> agents;

  friend bool operator==(const PolicyFile&, const PolicyFile&) = default;
};

std::string_view to_string(ThresholdMode mode);
ThresholdMode parse_threshold_mode(std::string_view text);

/// Policy file of a solved bundle.
PolicyFile make_policy_file(const SolutionBundle& bundle, std::span<const Agent> agents, const SolveConfig& config);

std::string write_policy(const PolicyFile& policy);
PolicyFile parse_policy(std::string_view json);
PolicyFile load_policy(const std::filesystem::path& path);

/// Rebuilds the team policy of `cluster` on product `p`. Throws FormatError
/// when a state or action label does not belong to the product.
TeamPolicy team_policy_from_file(const ClusterPolicy& cluster, const ProductMdp& p);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace coplan
