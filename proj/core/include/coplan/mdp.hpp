#pragma once

#include <coplan/error.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coplan {

using StateIndex = std::uint32_t;
using ActionIndex = std::uint32_t;

/// Absolute tolerance on the row sum of every stored distribution.
inline constexpr double kRowSumTolerance = 1e-9;

enum class ActionKind { handshake, independent };

struct Action {
  std::string label;
  ActionKind kind = ActionKind::independent;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Transition {
  StateIndex target = 0;
  double probability = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// A finite-support probability distribution over state indices.
///
/// Entries keep insertion order, carry strictly positive mass and sum to one
/// within kRowSumTolerance. Construction never renormalizes.
class Distribution {
public:
  Distribution() = default;
  explicit Distribution(std::vector<Transition> entries);

  std::span<const Transition> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double probability(StateIndex target) const noexcept;
  double total() const noexcept;

  friend bool operator==(const Distribution&, const Distribution&) = default;

private:
  std::vector<Transition> entries_;
};

/// One enabled action at a state together with its successor distribution.
struct Choice {
  ActionIndex action = 0;
  Distribution distribution;

  friend bool operator==(const Choice&, const Choice&) = default;
};

/// Immutable Markov decision process. States and actions are indexed in
/// declaration order; the choices of a state are sorted by action index.
class Mdp {
public:
  std::size_t num_states() const noexcept { return state_labels_.size(); }
  std::size_t num_actions() const noexcept { return actions_.size(); }
  std::size_t num_choices() const noexcept { return num_choices_; }
  StateIndex initial() const noexcept { return initial_; }

  const std::string& state_label(StateIndex s) const { return state_labels_.at(s); }
  std::span<const std::string> state_labels() const noexcept { return state_labels_; }
  const Action& action(ActionIndex a) const { return actions_.at(a); }
  std::span<const Action> actions() const noexcept { return actions_; }

  std::span<const Choice> choices(StateIndex s) const { return choices_.at(s); }
  const Choice* find_choice(StateIndex s, ActionIndex a) const;
  bool is_available(StateIndex s, ActionIndex a) const { return find_choice(s, a) != nullptr; }

  std::optional<StateIndex> find_state(std::string_view label) const;
  std::optional<ActionIndex> find_action(std::string_view label) const;

  friend bool operator==(const Mdp& a, const Mdp& b) {
    return a.state_labels_ == b.state_labels_ && a.initial_ == b.initial_ &&
           a.actions_ == b.actions_ && a.choices_ == b.choices_;
  }

private:
  friend class MdpBuilder;

  std::vector<std::string> state_labels_;
  StateIndex initial_ = 0;
  std::vector<Action> actions_;
  std::vector<std::vector<Choice>> choices_;
  std::size_t num_choices_ = 0;
  std::unordered_map<std::string, StateIndex> state_lookup_;
  std::unordered_map<std::string, ActionIndex> action_lookup_;
};

/// Incremental, index-based MDP construction. `build()` enforces all model
/// invariants: unique labels, valid rows, no duplicate (s, a, s') triple and
/// at least one enabled action per state.
class MdpBuilder {
public:
  StateIndex add_state(std::string label);
  ActionIndex add_action(std::string label, ActionKind kind);
  void set_initial(StateIndex s);
  /// Zero-probability entries are accepted and dropped from the stored support.
  void add_transition(StateIndex from, ActionIndex action, StateIndex to, double probability);

  std::optional<StateIndex> find_state(std::string_view label) const;
  std::optional<ActionIndex> find_action(std::string_view label) const;

  Mdp build() &&;

private:
  struct Row {
    StateIndex state;
    ActionIndex action;
    std::vector<Transition> entries;
  };

  std::vector<std::string> state_labels_;
  std::vector<Action> actions_;
  std::unordered_map<std::string, StateIndex> state_lookup_;
  std::unordered_map<std::string, ActionIndex> action_lookup_;
  std::optional<StateIndex> initial_;
  std::vector<Row> rows_;
  std::unordered_map<std::uint64_t, std::size_t> row_lookup_;
};

/// Label-based model description, as read from a model file.
struct RawAction {
  std::string label;
  ActionKind kind = ActionKind::independent;
};

struct RawTransition {
  std::string from;
  std::string action;
  std::string to;
  double probability = 0.0;
};

struct RawMdp {
  std::vector<std::string> states;
  std::string initial;
  std::vector<RawAction> actions;
  std::vector<RawTransition> transitions;
};

Mdp build_mdp(const RawMdp& raw);

std::vector<ActionIndex> available_actions(const Mdp& m, StateIndex s);
std::vector<StateIndex> post_states(const Mdp& m, StateIndex s, ActionIndex a);

/// Dense state-action by state matrix. Rows are ordered by state, then by
/// action declaration order.
struct TransitionMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::pair<StateIndex, ActionIndex>> row_keys;
  std::vector<double> values;  // row-major

  double at(std::size_t r, std::size_t c) const { return values.at(r * cols + c); }
};

TransitionMatrix transition_matrix(const Mdp& m);

/// Discrete-time Markov chain: one distribution per state.
class Dtmc {
public:
  Dtmc(std::vector<std::string> state_labels, StateIndex initial, std::vector<Distribution> rows);

  std::size_t num_states() const noexcept { return rows_.size(); }
  StateIndex initial() const noexcept { return initial_; }
  const std::string& state_label(StateIndex s) const { return state_labels_.at(s); }
  std::span<const std::string> state_labels() const noexcept { return state_labels_; }
  const Distribution& row(StateIndex s) const { return rows_.at(s); }
  double probability(StateIndex from, StateIndex to) const { return row(from).probability(to); }

private:
  std::vector<std::string> state_labels_;
  StateIndex initial_;
  std::vector<Distribution> rows_;
};

/// Memoryless deterministic policy: one action index per state.
struct StationaryPolicy {
  std::vector<ActionIndex> choice;

  friend bool operator==(const StationaryPolicy&, const StationaryPolicy&) = default;
};

Dtmc induce_dtmc(const Mdp& m, const StationaryPolicy& policy);

/// Views a chain as an MDP with a single action (named `label`) per state.
Mdp as_mdp(const Dtmc& d, std::string label = "tau");

/// Probability of the cylinder set spanned by `path` (1 for a single state).
double finite_path_probability(const Dtmc& d, std::span<const StateIndex> path);

/// A finite path. `actions` is either empty (chain traces) or has exactly
/// `states.size() - 1` entries. Position 0 is the start state.
struct FinitePath {
  std::vector<StateIndex> states;
  std::vector<ActionIndex> actions;

  std::size_t length() const noexcept { return states.empty() ? 0 : states.size() - 1; }
  friend bool operator==(const FinitePath&, const FinitePath&) = default;
};

/// True when every step of `path` has positive probability in `m`.
bool is_feasible(const Mdp& m, const FinitePath& path);

/// States reachable from `from` using any enabled action.
std::vector<bool> reachable_states(const Mdp& m, StateIndex from);

}  // namespace coplan
