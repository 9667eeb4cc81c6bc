#pragma once

#include <coplan/mdp.hpp>
#include <coplan/pctl.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coplan {

/// 0-based position of an agent in the team; printed 1-based.
using AgentIndex = std::uint32_t;

struct Agent {
  std::string id;
  Mdp mdp;
  std::string formula_text;    // empty when the agent has no task
  pctl::StateFormula formula;  // core formula, null when formula_text is empty
};

/// Labels of the agent's handshaking (shared) actions.
std::set<std::string> handshake_actions(const Mdp& m);
/// Labels of the agent's private actions.
std::set<std::string> independent_actions(const Mdp& m);

/// Checks the team-level action partition: private action labels are
/// pairwise disjoint and no label is handshake for one agent and private
/// for another. Throws ModelError otherwise.
void validate_action_partition(std::span<const Agent> agents);

/// Witness that the participants can stand on the same region at step
/// `step` with `action` enabled for all of them.
struct MeetEvidence {
  std::string action;
  std::size_t step = 0;
  std::string meet_state;
  std::vector<std::pair<AgentIndex, FinitePath>> paths;
};

/// Searches steps 0..horizon for a region label reachable by every
/// participant at the same step, with `action` enabled there for all.
/// Throws std::invalid_argument if fewer than two participants or a zero
/// horizon are given, and ModelError if `action` is not a handshake action of
/// every participant.
std::optional<MeetEvidence> check_handshake_wellposed(std::span<const Agent> agents,
                                                      std::span<const AgentIndex> participants,
                                                      std::string_view action, std::size_t horizon);

enum class DependencyRule {
  /// Any shared handshake label makes two agents dependent.
  shared_action,
  /// A shared handshake label only counts if the pair can meet on a region
  /// enabling it within the horizon.
  shared_action_and_meeting,
};

struct DependencyOptions {
  DependencyRule rule = DependencyRule::shared_action;
  /// Meeting-search horizon; defaults to the largest member state count times the number of agents.
  std::optional<std::size_t> horizon;
};

/// Shared handshake labels of two agents, sorted.
std::vector<std::string> shared_handshakes(const Agent& a, const Agent& b);

bool check_dependent(std::span<const Agent> agents, AgentIndex i, AgentIndex j,
                     const DependencyOptions& options = {});

class DependencyGraph {
public:
  explicit DependencyGraph(std::size_t num_vertices) : adjacency_(num_vertices) {}

  void add_edge(AgentIndex i, AgentIndex j);
  bool has_edge(AgentIndex i, AgentIndex j) const;

  std::size_t num_vertices() const noexcept { return adjacency_.size(); }
  /// Edges as (i, j) with i < j, sorted.
  std::vector<std::pair<AgentIndex, AgentIndex>> edges() const;
  const std::set<AgentIndex>& neighbors(AgentIndex i) const { return adjacency_.at(i); }

private:
  std::vector<std::set<AgentIndex>> adjacency_;
};

DependencyGraph build_dependency_graph(std::span<const Agent> agents,
                                       const DependencyOptions& options = {});

/// Connected components of the dependency graph. Clusters are sorted by
/// their smallest member and list members in increasing order.
struct Clustering {
  std::vector<std::vector<AgentIndex>> clusters;
  std::vector<std::size_t> cluster_of;  // agent -> 0-based cluster index

  std::size_t size() const noexcept { return clusters.size(); }
  bool independent(AgentIndex i) const { return clusters.at(cluster_of.at(i)).size() == 1; }
};

Clustering compute_clusters(const DependencyGraph& g);

struct StateCount {
  std::optional<std::uint64_t> exact;  // empty on 64-bit overflow
  double log10 = 0.0;
};

struct StateCountReport {
  std::vector<StateCount> clusters;
  StateCount centralized;
  /// Largest cluster product does not exceed the centralized product.
  bool ordering_holds = false;
  /// Largest cluster product is strictly smaller than the centralized one.
  bool strictly_smaller = false;
};

StateCountReport estimate_state_counts(const Clustering& clustering,
                                       std::span<const std::size_t> states_per_agent);
StateCountReport estimate_state_counts(const Clustering& clustering, std::uint64_t regions_per_agent);

/// Non-fatal modelling diagnostics: no dependent pair at all, handshake
/// labels declared by a single agent, and handshakes whose sharers can never
/// meet within the horizon.
std::vector<std::string> coupling_warnings(std::span<const Agent> agents, const Clustering& clustering,
                                           std::optional<std::size_t> horizon = std::nullopt);

}  // namespace coplan
