#pragma once

#include <coplan/coupling.hpp>
#include <coplan/mdp.hpp>
#include <coplan/pctl.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace coplan {

/// Bit j set means the j-th cluster member moves under a product row.
using MoverMask = std::uint64_t;

struct ProductOptions {
  /// Keep only joint states reachable from the joint initial state.
  bool prune_unreachable = true;
};

/// Joint model of one dependency cluster.
///
/// `model` is an ordinary Mdp over joint states labelled "(r_1|...|r_c)"
/// (singleton clusters keep the agent's own labels). Every choice carries the
/// set of members that move under it: all members for full-synchronisation
/// rows, a strict subset for partial rows, whose non-movers keep their
/// component in every successor.
class ProductMdp {
public:
  const std::vector<AgentIndex>& members() const noexcept { return members_; }
  std::size_t arity() const noexcept { return members_.size(); }
  const Mdp& model() const noexcept { return model_; }

  /// Local state index of member `j` in joint state `s`.
  StateIndex component(StateIndex s, std::size_t j) const { return components_.at(s).at(j); }
  std::span<const StateIndex> components(StateIndex s) const { return components_.at(s); }
  /// Region label of member `j`'s component in joint state `s`.
  const std::string& component_label(StateIndex s, std::size_t j) const {
    return member_labels_.at(j).at(component(s, j));
  }

  /// Movers of the `choice_pos`-th choice of `s` (position in model().choices(s)).
  MoverMask movers(StateIndex s, std::size_t choice_pos) const { return movers_.at(s).at(choice_pos); }
  MoverMask all_members() const noexcept;
  bool is_full_row(StateIndex s, std::size_t choice_pos) const { return movers(s, choice_pos) == all_members(); }

  /// Local action index of product action `a` for member `j`, if declared.
  std::optional<ActionIndex> local_action(ActionIndex a, std::size_t j) const { return local_actions_.at(a).at(j); }
  /// Members that declare product action `a` as a handshake action.
  MoverMask sharers(ActionIndex a) const { return sharers_.at(a); }

  bool pruned() const noexcept { return pruned_; }
  /// Size of the full cartesian state space, before pruning.
  std::uint64_t full_state_count() const noexcept { return full_state_count_; }

private:
  friend ProductMdp build_product(std::span<const Agent>, std::span<const AgentIndex>, const ProductOptions&);

  std::vector<AgentIndex> members_;
  Mdp model_;
  std::vector<std::vector<StateIndex>> components_;
  std::vector<std::vector<std::string>> member_labels_;
  std::vector<std::vector<MoverMask>> movers_;
  std::vector<std::vector<std::optional<ActionIndex>>> local_actions_;
  std::vector<MoverMask> sharers_;
  bool pruned_ = false;
  std::uint64_t full_state_count_ = 0;
};

/// Builds the product of the cluster members' MDPs (members sorted by index).
///
/// For a joint state and action `a`, let E be the members enabling `a`:
///   E = whole cluster            -> all members move, probabilities multiply;
///   E strict, nonempty subset    -> only E moves, the rest stay put;
/// except that a handshake action is blocked when a member sharing it is not
/// in E. Throws ProductError if a joint state in the result has no row.
ProductMdp build_product(std::span<const Agent> agents, std::span<const AgentIndex> members,
                         const ProductOptions& options = {});

/// Conjunction of the members' formulas, in member order. Members without a
/// task contribute nothing; an empty conjunction is `true`. Throws
/// ModelError when an atom names an action no member declares.
pctl::StateFormula mutual_formula(std::span<const Agent> agents, std::span<const AgentIndex> members);

/// Joint states where `action` can fire for all its sharers while they
/// occupy the same region. Throws ModelError if `action` is not a handshake
/// action of the product.
std::vector<StateIndex> handshake_enabled_states(const ProductMdp& p, std::string_view action);

/// True when all members in `sharers` stand on the same region label in `s`.
bool sharers_colocated(const ProductMdp& p, StateIndex s, MoverMask sharers);

/// Members (as team agent indices) set in `mask`.
std::vector<AgentIndex> mask_members(const ProductMdp& p, MoverMask mask);

}  // namespace coplan
