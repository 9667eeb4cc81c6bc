#pragma once

#include <coplan/coupling.hpp>
#include <coplan/product.hpp>
#include <coplan/synthesis.hpp>

#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace coplan {

inline constexpr ActionIndex kNoAction = std::numeric_limits<ActionIndex>::max();

/// Stationary choice per product state. States outside the enumeration
/// domain hold kNoAction.
struct TeamPolicy {
  std::size_t cluster = 0;
  std::vector<ActionIndex> choice;

  bool defined(StateIndex s) const { return choice.at(s) != kNoAction; }
  friend bool operator==(const TeamPolicy&, const TeamPolicy&) = default;
};

/// Completes `tp` with each state's first available action where undefined.
StationaryPolicy to_stationary(const TeamPolicy& tp, const Mdp& m);

/// Same states and actions as `m`, keeping only the chosen choice per state.
Mdp restrict_to_policy(const Mdp& m, const StationaryPolicy& policy);

/// Compact SP set: allowed actions per product state (sorted by label),
/// restricted to the states reachable through them.
struct SpSet {
  std::size_t cluster = 0;
  AllowedActions allowed;
  std::vector<StateIndex> domain;         // ascending
  std::vector<StateIndex> relaxed;        // non-initial states widened to every available action
  bool empty = false;                     // no allowed action at the initial state

  /// Number of stationary policies in the set, saturating.
  std::size_t size() const;
};

SpSet make_sp_set(const Mdp& m, const pctl::StateFormula& formula, const SynthesisConfig& config = {},
                  std::size_t cluster = 0);

/// Lazy lexicographic enumeration: earlier domain states vary slowest,
/// actions within a state in label order.
class PolicyEnumerator {
public:
  PolicyEnumerator(const SpSet& sp, std::size_t num_states, std::size_t limit);

  std::optional<TeamPolicy> next();
  std::size_t produced() const noexcept { return produced_; }
  /// True when enumeration stopped at the limit with candidates left.
  bool capped() const noexcept { return capped_; }

private:
  const SpSet* sp_;
  std::size_t num_states_;
  std::size_t limit_;
  std::vector<std::size_t> cursor_;
  std::size_t produced_ = 0;
  bool done_ = false;
  bool capped_ = false;
};

std::vector<TeamPolicy> enumerate_team_policies(const SpSet& sp, std::size_t num_states, std::size_t limit);

/// Handshake actions in the range of `tp`.
std::set<ActionIndex> succ_actions(const TeamPolicy& tp, const Mdp& m);

struct SuccessViolation {
  StateIndex state;
  ActionIndex action;
  std::string reason;
};

struct SuccessReport {
  bool successful = true;
  std::vector<SuccessViolation> violations;
};

/// Every handshake choice must sit at a joint state where all sharers stand
/// on one region and each of them moves under the action. Checked on the
/// states reachable under `tp`, or on every defined state when `strict`.
SuccessReport is_successful(const TeamPolicy& tp, const ProductMdp& p, bool strict = false);

/// One row of a projected local policy: in joint context `context`, the
/// agent in local state `local_state` takes `action`, or idles when
/// `action` is empty.
struct LocalPolicyEntry {
  StateIndex context = 0;
  std::string context_label;
  std::string local_state;
  std::string action;

  friend bool operator==(const LocalPolicyEntry&, const LocalPolicyEntry&) = default;
};

struct AgentPolicy {
  AgentIndex agent = 0;
  std::string agent_id;
  std::size_t cluster = 0;
  std::vector<LocalPolicyEntry> entries;

  friend bool operator==(const AgentPolicy&, const AgentPolicy&) = default;
};

std::vector<AgentPolicy> project_policy(const TeamPolicy& tp, const ProductMdp& p, std::span<const Agent> agents);

struct ProbReport {
  std::string formula;
  pctl::Comparator comparator = pctl::Comparator::greater_equal;
  double threshold = 0.0;
  double value = 0.0;  // at the initial state of the induced chain
  bool holds = false;
  bool unbounded = false;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = true;

  friend bool operator==(const ProbReport&, const ProbReport&) = default;
};

struct PolicyEvaluation {
  bool holds = false;  // at the initial state
  StateSet sat;
  std::vector<ProbReport> probabilities;
};

/// Exact semantics of `formula` on the chain induced by `policy`. Atoms
/// and operands of probability operators keep their meaning on `m`; the
/// probability operators reached through boolean connectives are measured
/// on the induced chain.
PolicyEvaluation evaluate_policy(const Mdp& m, const StationaryPolicy& policy, const pctl::StateFormula& formula,
                                 const SynthesisConfig& config = {});

enum class SolveStatus { solved, no_solution, inconclusive };

std::string_view to_string(SolveStatus status);

struct FormulaReport {
  std::string agent_id;
  std::string formula;
  bool holds = false;
  std::vector<ProbReport> probabilities;

  friend bool operator==(const FormulaReport&, const FormulaReport&) = default;
};

struct ClusterSolution {
  std::size_t index = 0;
  std::vector<AgentIndex> members;
  SolveStatus status = SolveStatus::no_solution;
  std::optional<ProductMdp> product;
  std::optional<TeamPolicy> policy;
  std::size_t sp_size = 0;
  std::size_t policies_checked = 0;
  std::vector<StateIndex> relaxed;
  std::string reason;
  std::vector<FormulaReport> reports;
};

struct SolveConfig {
  SynthesisConfig synthesis;
  DependencyOptions dependency;
  ProductOptions product;
  std::size_t max_policies = 100'000;
  bool strict_success = false;
  unsigned jobs = 1;
};

struct SolutionBundle {
  SolveStatus status = SolveStatus::solved;
  Clustering clustering;
  std::vector<ClusterSolution> clusters;
  std::vector<AgentPolicy> agent_policies;  // by agent index, filled when solved

  /// First cluster that is not solved, if any.
  const ClusterSolution* failing_cluster() const;
};

/// Dependency check, clustering, per-cluster product and elimination, then
/// the first candidate of SP(l) that meets the cluster formula on its chain
/// and is successful. Clusters run concurrently up to `jobs`; results do not
/// depend on it.
SolutionBundle solve_problem1(std::span<const Agent> agents, const SolveConfig& config = {});

ClusterSolution solve_cluster(std::span<const Agent> agents, std::span<const AgentIndex> members, std::size_t index,
                              const SolveConfig& config = {});

}  // namespace coplan
