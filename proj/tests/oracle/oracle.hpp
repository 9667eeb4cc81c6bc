#pragma once

// Reference computations for tests. Everything here works from path
// semantics or explicit policy enumeration and shares no code with the
// synthesis module.

#include <coplan/coupling.hpp>
#include <coplan/mdp.hpp>
#include <coplan/pctl.hpp>
#include <coplan/product.hpp>
#include <coplan/synthesis.hpp>

#include <random>
#include <vector>

namespace coplan::oracle {

struct RandomMdpOptions {
  std::size_t min_states = 2;
  std::size_t max_states = 6;
  std::size_t num_actions = 3;  // labels a0, a1, ...
  std::size_t max_support = 3;
  double availability = 0.6;  // chance each extra action is enabled at a state
};

Mdp random_mdp(std::mt19937_64& rng, const RandomMdpOptions& options = {});

StateSet random_set(std::mt19937_64& rng, std::size_t n, double density = 0.5);

/// Every deterministic stationary policy of `m`, in odometer order.
std::vector<StationaryPolicy> all_stationary_policies(const Mdp& m, std::size_t limit = 1'000'000);

/// Extremal probability of `X target`, over stationary policies.
std::vector<double> brute_force_next(const Mdp& m, const StateSet& target, OptimizationMode mode);

/// Extremal probability of `lhs U<=k rhs` over history-dependent
/// deterministic policies, by explicit search of the history tree. Each
/// leaf checks the until condition on the full path prefix.
std::vector<double> brute_force_bounded_until(const Mdp& m, const StateSet& lhs, const StateSet& rhs, std::uint64_t k,
                                              OptimizationMode mode);

/// Extremal probability of `G<=k f`, same search.
std::vector<double> brute_force_bounded_always(const Mdp& m, const StateSet& f, std::uint64_t k,
                                               OptimizationMode mode);

/// Probability of `lhs U rhs` on a chain: graph analysis for the zero
/// states, dense LU solve for the rest.
std::vector<double> chain_unbounded_until(const Dtmc& d, const StateSet& lhs, const StateSet& rhs);

/// Probability of `lhs U<=k rhs` on a chain by summing explicit paths.
std::vector<double> chain_bounded_until(const Dtmc& d, const StateSet& lhs, const StateSet& rhs, std::uint64_t k);

/// Extremum over stationary policies of the chain solve.
std::vector<double> brute_force_unbounded_until(const Mdp& m, const StateSet& lhs, const StateSet& rhs,
                                                OptimizationMode mode);

/// Sat set of an atom-level formula (True/Atom/Not/And/Or/Implies).
StateSet propositional_sat(const Mdp& m, const pctl::StateFormula& f);

/// Whether `f` holds at the initial state of the chain induced by `policy`.
/// Supports boolean structure over probability operators whose operands
/// are propositional.
bool holds_under_policy(const Mdp& m, const StationaryPolicy& policy, const pctl::StateFormula& f);

/// Whether any stationary policy of the product meets the cluster formula
/// and executes every handshake (on states it reaches) with all sharers
/// co-located.
bool exists_successful_policy(std::span<const Agent> agents, const ProductMdp& p, const pctl::StateFormula& f);

}  // namespace coplan::oracle
