#pragma once

#include <coplan/coupling.hpp>
#include <coplan/mdp.hpp>
#include <coplan/pctl.hpp>
#include <coplan/synthesis.hpp>

#include <string>
#include <tuple>
#include <vector>

namespace coplan::test {

using Row = std::tuple<std::string, std::string, std::string, double>;  // from, action, to, prob

inline Mdp make_mdp(std::vector<std::string> states, std::vector<std::string> handshake,
                    std::vector<std::string> independent, const std::vector<Row>& rows, std::string initial = {}) {
  RawMdp raw;
  raw.initial = initial.empty() ? states.front() : initial;
  raw.states = std::move(states);
  for (auto& a : handshake) raw.actions.push_back({std::move(a), ActionKind::handshake});
  for (auto& a : independent) raw.actions.push_back({std::move(a), ActionKind::independent});
  for (const auto& [from, action, to, p] : rows) raw.transitions.push_back({from, action, to, p});
  return build_mdp(raw);
}

inline Agent make_agent(std::string id, Mdp m, std::string formula = {}) {
  Agent a{std::move(id), std::move(m), formula, nullptr};
  if (!formula.empty()) a.formula = pctl::parse_formula(formula);
  return a;
}

inline StateSet states_of(const Mdp& m, std::initializer_list<const char*> labels) {
  StateSet out(m.num_states(), false);
  for (const char* l : labels) out[*m.find_state(l)] = true;
  return out;
}

inline ActionIndex act(const Mdp& m, const char* label) { return *m.find_action(label); }
inline StateIndex st(const Mdp& m, const char* label) { return *m.find_state(label); }

}  // namespace coplan::test
