#include <coplan/synthesis.hpp>

namespace coplan {

namespace {

// Reverse edges: for every state, the (state, choice position) pairs that
// can move into it.
struct Predecessors {
  std::vector<std::vector<std::pair<StateIndex, std::uint32_t>>> into;

  explicit Predecessors(const Mdp& m) : into(m.num_states()) {
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      const auto choices = m.choices(s);
      for (std::uint32_t c = 0; c < choices.size(); ++c) {
        for (const auto& t : choices[c].distribution.entries()) {
          auto& list = into[t.target];
          if (list.empty() || list.back() != std::pair{s, c}) list.emplace_back(s, c);
        }
      }
    }
  }
};

StateSet complement(StateSet s) {
  s.flip();
  return s;
}

// Least fixpoint from `seed`: a `rem` state joins once one of its usable
// choices (every_action = false) or all of its choices (every_action = true)
// can move into the set. `usable(s, c)` filters choices in the existential case.
template <class Usable>
StateSet backward_closure(const Mdp& m, const Predecessors& pred, const UntilPartition& part, StateSet seed,
                          bool every_action, Usable usable) {
  StateSet r = std::move(seed);
  std::vector<StateIndex> work;
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    if (r[s]) work.push_back(s);
  }
  std::vector<std::size_t> missing;  // choices of s not yet hitting r
  std::vector<std::vector<bool>> hit;
  if (every_action) {
    missing.resize(m.num_states());
    hit.resize(m.num_states());
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      missing[s] = m.choices(s).size();
      hit[s].assign(missing[s], false);
    }
  }
  while (!work.empty()) {
    const StateIndex t = work.back();
    work.pop_back();
    for (auto [s, c] : pred.into[t]) {
      if (r[s] || !part.rem[s]) continue;
      bool join = false;
      if (every_action) {
        if (!hit[s][c]) {
          hit[s][c] = true;
          join = --missing[s] == 0;
        }
      } else {
        join = usable(s, c);
      }
      if (join) {
        r[s] = true;
        work.push_back(s);
      }
    }
  }
  return r;
}

constexpr auto any_choice = [](StateIndex, std::uint32_t) { return true; };

}  // namespace

StateSet prob0_max(const Mdp& m, const UntilPartition& part) {
  Predecessors pred(m);
  return complement(backward_closure(m, pred, part, part.yes, false, any_choice));
}

StateSet prob0_min(const Mdp& m, const UntilPartition& part) {
  Predecessors pred(m);
  return complement(backward_closure(m, pred, part, part.yes, true, any_choice));
}

StateSet prob1_max(const Mdp& m, const UntilPartition& part) {
  Predecessors pred(m);
  StateSet outer(m.num_states(), true);
  std::vector<std::vector<bool>> stays(m.num_states());
  while (true) {
    // Choices that cannot leave `outer`.
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      const auto choices = m.choices(s);
      stays[s].assign(choices.size(), true);
      for (std::size_t c = 0; c < choices.size(); ++c) {
        for (const auto& t : choices[c].distribution.entries()) {
          if (!outer[t.target]) {
            stays[s][c] = false;
            break;
          }
        }
      }
    }
    StateSet inner = backward_closure(m, pred, part, part.yes, false,
                                      [&](StateIndex s, std::uint32_t c) { return stays[s][c]; });
    if (inner == outer) return outer;
    outer = std::move(inner);
  }
}

StateSet prob1_min(const Mdp& m, const UntilPartition& part) {
  // A state keeps minimum probability 1 unless some policy can, while still
  // inside `rem`, reach a state whose minimum is 0.
  Predecessors pred(m);
  StateSet zero = complement(backward_closure(m, pred, part, part.yes, true, any_choice));
  return complement(backward_closure(m, pred, part, std::move(zero), false, any_choice));
}

}  // namespace coplan
