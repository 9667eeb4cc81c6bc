#include <coplan/synthesis.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coplan {

namespace {

using pctl::Comparator;

bool better(double a, double b, OptimizationMode mode) { return mode == OptimizationMode::max ? a > b : a < b; }

double sum_over(const Choice& c, const std::vector<double>& x) {
  double v = 0.0;
  for (const auto& t : c.distribution.entries()) v += t.probability * x[t.target];
  return v;
}

// Fills values[s] with the extremum of choice_values[s] and witnesses[s]
// with every action within tolerance of it.
void settle(const Mdp& m, ExtremalResult& r, double tolerance) {
  const auto n = m.num_states();
  r.values.assign(n, 0.0);
  r.witnesses.assign(n, {});
  for (StateIndex s = 0; s < n; ++s) {
    const auto& cv = r.choice_values[s];
    double best = cv.front();
    for (double v : cv) {
      if (better(v, best, r.mode)) best = v;
    }
    r.values[s] = best;
    auto cs = m.choices(s);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (std::abs(cv[k] - best) <= tolerance) r.witnesses[s].push_back(cs[k].action);
    }
  }
}

StateSet all_states(const Mdp& m) { return StateSet(m.num_states(), true); }

}  // namespace

std::size_t SatSet::count() const { return static_cast<std::size_t>(std::count(states.begin(), states.end(), true)); }

bool AllowedActions::allows(StateIndex s, ActionIndex a) const {
  const auto& v = per_state.at(s);
  return std::find(v.begin(), v.end(), a) != v.end();
}

UntilPartition until_partition(const StateSet& lhs, const StateSet& rhs) {
  if (lhs.size() != rhs.size()) throw std::invalid_argument("until operands have different state counts");
  UntilPartition p;
  p.yes = rhs;
  p.no.assign(rhs.size(), false);
  p.rem.assign(rhs.size(), false);
  for (std::size_t s = 0; s < rhs.size(); ++s) {
    if (rhs[s]) continue;
    (lhs[s] ? p.rem : p.no)[s] = true;
  }
  return p;
}

OptimizationMode reduction_mode(Comparator cmp, ThresholdMode mode) {
  const bool lower_bound = cmp == Comparator::greater || cmp == Comparator::greater_equal;
  if (mode == ThresholdMode::existential) return lower_bound ? OptimizationMode::max : OptimizationMode::min;
  return lower_bound ? OptimizationMode::min : OptimizationMode::max;
}

ExtremalResult prob_next_extremal(const Mdp& m, const StateSet& target, OptimizationMode mode, double tie_tolerance) {
  ExtremalResult r;
  r.mode = mode;
  r.choice_values.resize(m.num_states());
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    for (const auto& c : m.choices(s)) {
      double v = 0.0;
      for (const auto& t : c.distribution.entries()) {
        if (target.at(t.target)) v += t.probability;
      }
      r.choice_values[s].push_back(v);
    }
  }
  settle(m, r, tie_tolerance);
  return r;
}

ExtremalResult prob_bounded_until_extremal(const Mdp& m, const UntilPartition& part, std::uint64_t k,
                                           OptimizationMode mode, double tie_tolerance) {
  const auto n = m.num_states();
  std::vector<double> x(n, 0.0);
  for (StateIndex s = 0; s < n; ++s) x[s] = part.yes[s] ? 1.0 : 0.0;

  ExtremalResult r;
  r.mode = mode;
  r.choice_values.resize(n);
  for (StateIndex s = 0; s < n; ++s) {
    r.choice_values[s].assign(m.choices(s).size(), part.yes[s] ? 1.0 : 0.0);
  }
  std::vector<double> next(n);
  for (std::uint64_t step = 1; step <= k; ++step) {
    for (StateIndex s = 0; s < n; ++s) {
      if (!part.rem[s]) {
        next[s] = x[s];
        continue;
      }
      auto cs = m.choices(s);
      double best = 0.0;
      for (std::size_t c = 0; c < cs.size(); ++c) {
        double v = sum_over(cs[c], x);
        if (step == k) r.choice_values[s][c] = v;
        if (c == 0 || better(v, best, mode)) best = v;
      }
      next[s] = best;
    }
    x.swap(next);
    ++r.iterations;
  }
  settle(m, r, tie_tolerance);
  return r;
}

ExtremalResult prob_unbounded_until_extremal(const Mdp& m, const UntilPartition& part, OptimizationMode mode,
                                             const SynthesisConfig& config) {
  const auto n = m.num_states();
  StateSet zero = mode == OptimizationMode::max ? prob0_max(m, part) : prob0_min(m, part);
  StateSet one = mode == OptimizationMode::max ? prob1_max(m, part) : prob1_min(m, part);

  std::vector<double> x(n, 0.0);
  std::vector<bool> unknown(n, false);
  for (StateIndex s = 0; s < n; ++s) {
    if (one[s]) {
      x[s] = 1.0;
    } else if (!zero[s]) {
      unknown[s] = true;
    }
  }

  ExtremalResult r;
  r.mode = mode;
  r.residual = 0.0;
  std::vector<double> next = x;
  bool any_unknown = std::find(unknown.begin(), unknown.end(), true) != unknown.end();
  while (any_unknown) {
    if (r.iterations >= config.max_iterations) {
      r.converged = false;
      break;
    }
    double delta = 0.0;
    for (StateIndex s = 0; s < n; ++s) {
      if (!unknown[s]) continue;
      auto cs = m.choices(s);
      double best = sum_over(cs[0], x);
      for (std::size_t c = 1; c < cs.size(); ++c) {
        double v = sum_over(cs[c], x);
        if (better(v, best, mode)) best = v;
      }
      next[s] = best;
      delta = std::max(delta, std::abs(best - x[s]));
    }
    x.swap(next);
    ++r.iterations;
    r.residual = delta;
    if (delta < config.epsilon) break;
  }

  r.choice_values.resize(n);
  for (StateIndex s = 0; s < n; ++s) {
    for (const auto& c : m.choices(s)) {
      double v = part.yes[s] ? 1.0 : part.no[s] ? 0.0 : sum_over(c, x);
      r.choice_values[s].push_back(v);
    }
  }
  settle(m, r, config.tie_tolerance);
  // Qualitative states are exact, whatever the choice sums say.
  for (StateIndex s = 0; s < n; ++s) {
    if (one[s]) r.values[s] = 1.0;
    if (zero[s]) r.values[s] = 0.0;
  }
  return r;
}

ExtremalResult path_extremal(const Mdp& m, const pctl::PathFormula& path, OptimizationMode mode,
                             const SynthesisConfig& config) {
  return std::visit(
      [&](const auto& node) -> ExtremalResult {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, pctl::Next>) {
          return prob_next_extremal(m, sat_states(m, node.operand, config).states, mode, config.tie_tolerance);
        } else if constexpr (std::is_same_v<T, pctl::Until> || std::is_same_v<T, pctl::Eventually>) {
          StateSet lhs;
          StateSet rhs;
          if constexpr (std::is_same_v<T, pctl::Until>) {
            lhs = sat_states(m, node.lhs, config).states;
            rhs = sat_states(m, node.rhs, config).states;
          } else {
            lhs = all_states(m);
            rhs = sat_states(m, node.operand, config).states;
          }
          auto part = until_partition(lhs, rhs);
          if (node.bound) return prob_bounded_until_extremal(m, part, *node.bound, mode, config.tie_tolerance);
          return prob_unbounded_until_extremal(m, part, mode, config);
        } else {
          throw std::logic_error("G must be rewritten at its probability operator before evaluation");
        }
      },
      path->node);
}

ProbOperatorResult evaluate_prob_operator(const Mdp& m, Comparator cmp, double threshold,
                                          const pctl::PathFormula& path, const SynthesisConfig& config) {
  ProbOperatorResult out;
  out.extremal = path_extremal(m, path, reduction_mode(cmp, config.mode), config);
  out.sat.formula = pctl::make_prob(cmp, threshold, path);
  out.sat.states.assign(m.num_states(), false);
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    out.sat.states[s] = pctl::compare(out.extremal.values[s], cmp, threshold, config.tie_tolerance);
  }
  return out;
}

SatSet check_prob_operator(const Mdp& m, Comparator cmp, double threshold, const pctl::PathFormula& path,
                           const SynthesisConfig& config) {
  return evaluate_prob_operator(m, cmp, threshold, path, config).sat;
}

SatSet sat_states(const Mdp& m, const pctl::StateFormula& input, const SynthesisConfig& config) {
  const pctl::StateFormula f = pctl::is_core(input) ? input : pctl::rewrite_derived(input);
  const auto n = m.num_states();
  SatSet out{f, StateSet(n, false)};
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, pctl::True>) {
          out.states.assign(n, true);
        } else if constexpr (std::is_same_v<T, pctl::Atom>) {
          if (auto a = m.find_action(node.label)) {
            for (StateIndex s = 0; s < n; ++s) out.states[s] = m.is_available(s, *a);
          }
        } else if constexpr (std::is_same_v<T, pctl::Not>) {
          out.states = sat_states(m, node.operand, config).states;
          out.states.flip();
        } else if constexpr (std::is_same_v<T, pctl::Prob>) {
          out.states = check_prob_operator(m, node.comparator, node.threshold, node.path, config).states;
        } else {
          auto l = sat_states(m, node.lhs, config).states;
          auto r = sat_states(m, node.rhs, config).states;
          for (StateIndex s = 0; s < n; ++s) {
            if constexpr (std::is_same_v<T, pctl::And>) {
              out.states[s] = l[s] && r[s];
            } else if constexpr (std::is_same_v<T, pctl::Or>) {
              out.states[s] = l[s] || r[s];
            } else {
              out.states[s] = !l[s] || r[s];
            }
          }
        }
      },
      f->node);
  return out;
}

AllowedActions synthesize_allowed_actions(const Mdp& m, Comparator cmp, double threshold,
                                          const pctl::PathFormula& path, const SynthesisConfig& config) {
  auto ext = path_extremal(m, path, reduction_mode(cmp, config.mode), config);
  AllowedActions out;
  out.per_state.resize(m.num_states());
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    auto cs = m.choices(s);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (pctl::compare(ext.choice_values[s][k], cmp, threshold, config.tie_tolerance)) {
        out.per_state[s].push_back(cs[k].action);
      }
    }
  }
  return out;
}

AllowedActions synthesize_formula_actions(const Mdp& m, const pctl::StateFormula& input,
                                          const SynthesisConfig& config) {
  const pctl::StateFormula f = pctl::is_core(input) ? input : pctl::rewrite_derived(input);
  if (const auto* prob = std::get_if<pctl::Prob>(&f->node)) {
    return synthesize_allowed_actions(m, prob->comparator, prob->threshold, prob->path, config);
  }
  if (const auto* conj = std::get_if<pctl::And>(&f->node)) {
    auto l = synthesize_formula_actions(m, conj->lhs, config);
    auto r = synthesize_formula_actions(m, conj->rhs, config);
    AllowedActions out;
    out.per_state.resize(m.num_states());
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      for (auto a : l.per_state[s]) {
        if (r.allows(s, a)) out.per_state[s].push_back(a);
      }
    }
    return out;
  }
  auto sat = sat_states(m, f, config);
  AllowedActions out;
  out.per_state.resize(m.num_states());
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    if (sat.states[s]) out.per_state[s] = available_actions(m, s);
  }
  return out;
}

}  // namespace coplan
