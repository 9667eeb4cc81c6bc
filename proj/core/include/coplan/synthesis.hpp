#pragma once

#include <coplan/mdp.hpp>
#include <coplan/pctl.hpp>

#include <cstdint>
#include <vector>

namespace coplan {

enum class OptimizationMode { max, min };

/// How a probability bound is read on an MDP. `universal`: the bound must
/// hold under every policy (P>=p uses the minimum). `existential`: some
/// policy must meet it (P>=p uses the maximum).
enum class ThresholdMode { existential, universal };

using StateSet = std::vector<bool>;

struct SynthesisConfig {
  ThresholdMode mode = ThresholdMode::existential;
  double epsilon = 1e-8;                  // sup-norm stopping criterion, unbounded until
  std::size_t max_iterations = 1'000'000;  // unbounded until
  double tie_tolerance = 1e-9;            // argmax/argmin sets and threshold snapping
};

struct SatSet {
  pctl::StateFormula formula;
  StateSet states;

  bool contains(StateIndex s) const { return states.at(s); }
  std::size_t count() const;
};

struct ExtremalResult {
  OptimizationMode mode = OptimizationMode::max;
  std::vector<double> values;
  /// Per state, aligned with model.choices(s): the one-step value of taking
  /// that action and continuing optimally.
  std::vector<std::vector<double>> choice_values;
  /// Per state, the actions whose choice value is within tie tolerance of
  /// the extremum.
  std::vector<std::vector<ActionIndex>> witnesses;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

/// Partition of the state space for `lhs U rhs`.
struct UntilPartition {
  StateSet yes;  // Sat(rhs)
  StateSet no;   // neither lhs nor rhs
  StateSet rem;  // lhs and not rhs
};

UntilPartition until_partition(const StateSet& lhs, const StateSet& rhs);

/// Which extremum decides `P cmp p` under the given threshold mode.
OptimizationMode reduction_mode(pctl::Comparator cmp, ThresholdMode mode);

/// Sat set of a core state formula.
SatSet sat_states(const Mdp& m, const pctl::StateFormula& f, const SynthesisConfig& config = {});

struct ProbOperatorResult {
  SatSet sat;
  ExtremalResult extremal;
};

ProbOperatorResult evaluate_prob_operator(const Mdp& m, pctl::Comparator cmp, double threshold,
                                          const pctl::PathFormula& path, const SynthesisConfig& config = {});

SatSet check_prob_operator(const Mdp& m, pctl::Comparator cmp, double threshold,
                           const pctl::PathFormula& path, const SynthesisConfig& config = {});

ExtremalResult prob_next_extremal(const Mdp& m, const StateSet& target, OptimizationMode mode,
                                  double tie_tolerance = 1e-9);

/// k-step recursion: value 1 on `yes`, 0 on `no`, and on `rem`
/// x_k(s) = opt_a sum_s' delta(s,a,s') x_{k-1}(s') with x_0 = 0 off `yes`.
ExtremalResult prob_bounded_until_extremal(const Mdp& m, const UntilPartition& part, std::uint64_t k,
                                           OptimizationMode mode, double tie_tolerance = 1e-9);

/// Value iteration to a sup-norm fixpoint after graph-based 0/1
/// precomputation. Non-convergence is reported through `converged` and
/// `residual`; the values are still returned.
ExtremalResult prob_unbounded_until_extremal(const Mdp& m, const UntilPartition& part, OptimizationMode mode,
                                             const SynthesisConfig& config = {});

/// Resolves the path formula's operands to Sat sets and dispatches.
ExtremalResult path_extremal(const Mdp& m, const pctl::PathFormula& path, OptimizationMode mode,
                             const SynthesisConfig& config = {});

// Qualitative reachability for `part` (probability exactly 0 or 1).
StateSet prob0_max(const Mdp& m, const UntilPartition& part);  // max probability is 0
StateSet prob0_min(const Mdp& m, const UntilPartition& part);  // min probability is 0
StateSet prob1_max(const Mdp& m, const UntilPartition& part);  // max probability is 1
StateSet prob1_min(const Mdp& m, const UntilPartition& part);  // min probability is 1

/// Actions surviving elimination; an empty list marks a state where no
/// action meets the bound.
struct AllowedActions {
  std::vector<std::vector<ActionIndex>> per_state;

  bool allows(StateIndex s, ActionIndex a) const;
  bool empty_at(StateIndex s) const { return per_state.at(s).empty(); }
};

/// Keeps, per state, the actions whose choice value satisfies `cmp p` under
/// the configured threshold mode.
AllowedActions synthesize_allowed_actions(const Mdp& m, pctl::Comparator cmp, double threshold,
                                          const pctl::PathFormula& path, const SynthesisConfig& config = {});

/// Elimination for a whole state formula: conjunctions intersect their
/// operands' allowed sets, probability operators eliminate per action, and
/// any other formula allows every action exactly on its Sat set.
AllowedActions synthesize_formula_actions(const Mdp& m, const pctl::StateFormula& f,
                                          const SynthesisConfig& config = {});

}  // namespace coplan
