#include <coplan/coupling.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace coplan {

namespace {

std::set<std::string> labels_of_kind(const Mdp& m, ActionKind kind) {
  std::set<std::string> out;
  for (const auto& a : m.actions()) {
    if (a.kind == kind) out.insert(a.label);
  }
  return out;
}

// Per-step reachable sets of one agent with back-pointers for path recovery.
struct Layers {
  struct Parent {
    StateIndex state;
    ActionIndex action;
  };
  std::vector<std::vector<bool>> present;
  std::vector<std::vector<std::optional<Parent>>> parent;
};

Layers explore(const Mdp& m, std::size_t horizon) {
  Layers l;
  l.present.assign(horizon + 1, std::vector<bool>(m.num_states(), false));
  l.parent.assign(horizon + 1, std::vector<std::optional<Layers::Parent>>(m.num_states()));
  l.present[0][m.initial()] = true;
  for (std::size_t k = 0; k < horizon; ++k) {
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      if (!l.present[k][s]) continue;
      for (const auto& c : m.choices(s)) {
        for (const auto& t : c.distribution.entries()) {
          if (!l.present[k + 1][t.target]) {
            l.present[k + 1][t.target] = true;
            l.parent[k + 1][t.target] = Layers::Parent{s, c.action};
          }
        }
      }
    }
  }
  return l;
}

FinitePath recover_path(const Layers& l, std::size_t step, StateIndex end) {
  FinitePath p;
  p.states.assign(step + 1, 0);
  p.actions.assign(step, 0);
  StateIndex s = end;
  for (std::size_t k = step; k > 0; --k) {
    p.states[k] = s;
    const auto& par = *l.parent[k][s];
    p.actions[k - 1] = par.action;
    s = par.state;
  }
  p.states[0] = s;
  return p;
}

std::size_t default_horizon(std::span<const Agent> agents, std::span<const AgentIndex> who) {
  std::size_t largest = 1;
  for (auto i : who) largest = std::max(largest, agents[i].mdp.num_states());
  return largest * who.size();
}

StateCount make_count(std::span<const std::size_t> sizes) {
  StateCount c;
  std::uint64_t exact = 1;
  bool overflow = false;
  for (auto n : sizes) {
    c.log10 += std::log10(static_cast<double>(n));
    if (!overflow && __builtin_mul_overflow(exact, static_cast<std::uint64_t>(n), &exact)) overflow = true;
  }
  if (!overflow) c.exact = exact;
  return c;
}

bool less_equal(const StateCount& a, const StateCount& b) {
  if (a.exact && b.exact) return *a.exact <= *b.exact;
  return a.log10 <= b.log10 + 1e-12;
}

bool strictly_less(const StateCount& a, const StateCount& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact;
  if (a.exact && !b.exact) return true;
  return a.log10 < b.log10 - 1e-12;
}

}  // namespace

std::set<std::string> handshake_actions(const Mdp& m) { return labels_of_kind(m, ActionKind::handshake); }

std::set<std::string> independent_actions(const Mdp& m) {
  return labels_of_kind(m, ActionKind::independent);
}

void validate_action_partition(std::span<const Agent> agents) {
  std::map<std::string, std::pair<ActionKind, std::size_t>> owner;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (const auto& a : agents[i].mdp.actions()) {
      auto [it, inserted] = owner.emplace(a.label, std::make_pair(a.kind, i));
      if (inserted) continue;
      const auto& [kind, first] = it->second;
      if (kind != a.kind) {
        throw ModelError("action '" + a.label + "' is a handshake action for one of agents '" +
                         agents[first].id + "', '" + agents[i].id + "' and private for the other");
      }
      if (kind == ActionKind::independent) {
        throw ModelError("independent action '" + a.label + "' declared by both agent '" +
                         agents[first].id + "' and agent '" + agents[i].id + "'");
      }
    }
  }
}

std::optional<MeetEvidence> check_handshake_wellposed(std::span<const Agent> agents,
                                                      std::span<const AgentIndex> participants,
                                                      std::string_view action, std::size_t horizon) {
  if (participants.size() < 2) throw std::invalid_argument("a handshake needs at least two agents");
  if (horizon < 1) throw std::invalid_argument("meeting horizon must be at least 1");

  std::vector<ActionIndex> local_action;
  std::vector<Layers> layers;
  for (auto i : participants) {
    const Mdp& m = agents[i].mdp;
    auto a = m.find_action(action);
    if (!a || m.action(*a).kind != ActionKind::handshake) {
      throw ModelError("'" + std::string(action) + "' is not a handshake action of agent '" +
                       agents[i].id + "'");
    }
    local_action.push_back(*a);
    layers.push_back(explore(m, horizon));
  }

  for (std::size_t k = 0; k <= horizon; ++k) {
    const Mdp& lead = agents[participants[0]].mdp;
    for (StateIndex s = 0; s < lead.num_states(); ++s) {
      if (!layers[0].present[k][s] || !lead.is_available(s, local_action[0])) continue;
      const std::string& label = lead.state_label(s);
      std::vector<StateIndex> where{s};
      bool everyone = true;
      for (std::size_t j = 1; j < participants.size() && everyone; ++j) {
        const Mdp& m = agents[participants[j]].mdp;
        auto t = m.find_state(label);
        everyone = t && layers[j].present[k][*t] && m.is_available(*t, local_action[j]);
        if (everyone) where.push_back(*t);
      }
      if (!everyone) continue;
      MeetEvidence ev;
      ev.action = std::string(action);
      ev.step = k;
      ev.meet_state = label;
      for (std::size_t j = 0; j < participants.size(); ++j) {
        ev.paths.emplace_back(participants[j], recover_path(layers[j], k, where[j]));
      }
      return ev;
    }
  }
  return std::nullopt;
}

std::vector<std::string> shared_handshakes(const Agent& a, const Agent& b) {
  auto x = handshake_actions(a.mdp);
  auto y = handshake_actions(b.mdp);
  std::vector<std::string> out;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  return out;
}

bool check_dependent(std::span<const Agent> agents, AgentIndex i, AgentIndex j,
                     const DependencyOptions& options) {
  if (i == j) throw std::invalid_argument("dependency is defined between distinct agents");
  auto shared = shared_handshakes(agents[i], agents[j]);
  if (shared.empty()) return false;
  if (options.rule == DependencyRule::shared_action) return true;
  std::array<AgentIndex, 2> pair{std::min(i, j), std::max(i, j)};
  std::size_t horizon = options.horizon.value_or(default_horizon(agents, pair));
  for (const auto& a : shared) {
    if (check_handshake_wellposed(agents, pair, a, horizon)) return true;
  }
  return false;
}

void DependencyGraph::add_edge(AgentIndex i, AgentIndex j) {
  if (i == j) throw std::invalid_argument("dependency graph has no self-loops");
  adjacency_.at(i).insert(j);
  adjacency_.at(j).insert(i);
}

bool DependencyGraph::has_edge(AgentIndex i, AgentIndex j) const { return adjacency_.at(i).count(j) > 0; }

std::vector<std::pair<AgentIndex, AgentIndex>> DependencyGraph::edges() const {
  std::vector<std::pair<AgentIndex, AgentIndex>> out;
  for (AgentIndex i = 0; i < adjacency_.size(); ++i) {
    for (auto j : adjacency_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

DependencyGraph build_dependency_graph(std::span<const Agent> agents, const DependencyOptions& options) {
  DependencyGraph g(agents.size());
  for (AgentIndex i = 0; i < agents.size(); ++i) {
    for (AgentIndex j = i + 1; j < agents.size(); ++j) {
      if (check_dependent(agents, i, j, options)) g.add_edge(i, j);
    }
  }
  return g;
}

Clustering compute_clusters(const DependencyGraph& g) {
  Clustering c;
  constexpr auto unassigned = static_cast<std::size_t>(-1);
  c.cluster_of.assign(g.num_vertices(), unassigned);
  for (AgentIndex root = 0; root < g.num_vertices(); ++root) {
    if (c.cluster_of[root] != unassigned) continue;
    std::size_t id = c.clusters.size();
    std::vector<AgentIndex> members{root};
    c.cluster_of[root] = id;
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (auto n : g.neighbors(members[head])) {
        if (c.cluster_of[n] == unassigned) {
          c.cluster_of[n] = id;
          members.push_back(n);
        }
      }
    }
    std::sort(members.begin(), members.end());
    c.clusters.push_back(std::move(members));
  }
  return c;
}

StateCountReport estimate_state_counts(const Clustering& clustering,
                                       std::span<const std::size_t> states_per_agent) {
  StateCountReport r;
  std::size_t largest = 0;
  for (const auto& members : clustering.clusters) {
    std::vector<std::size_t> sizes;
    for (auto i : members) sizes.push_back(states_per_agent[i]);
    r.clusters.push_back(make_count(sizes));
    if (r.clusters.size() > 1 && !less_equal(r.clusters.back(), r.clusters[largest])) {
      largest = r.clusters.size() - 1;
    }
  }
  r.centralized = make_count(states_per_agent);
  if (r.clusters.empty()) {
    r.ordering_holds = true;
    return r;
  }
  r.ordering_holds = less_equal(r.clusters[largest], r.centralized);
  r.strictly_smaller = strictly_less(r.clusters[largest], r.centralized);
  return r;
}

StateCountReport estimate_state_counts(const Clustering& clustering, std::uint64_t regions_per_agent) {
  std::vector<std::size_t> sizes(clustering.cluster_of.size(), regions_per_agent);
  return estimate_state_counts(clustering, sizes);
}

std::vector<std::string> coupling_warnings(std::span<const Agent> agents, const Clustering& clustering,
                                           std::optional<std::size_t> horizon) {
  std::vector<std::string> out;
  bool any_coupled = std::any_of(clustering.clusters.begin(), clustering.clusters.end(),
                                 [](const auto& c) { return c.size() >= 2; });
  if (!any_coupled) {
    out.push_back("no two agents are dependent; every agent is synthesized on its own");
  }

  std::map<std::string, std::vector<AgentIndex>> sharers;
  for (AgentIndex i = 0; i < agents.size(); ++i) {
    for (const auto& a : handshake_actions(agents[i].mdp)) sharers[a].push_back(i);
  }
  for (const auto& [label, who] : sharers) {
    if (who.size() < 2) {
      out.push_back("handshake action '" + label + "' is declared only by agent '" +
                    agents[who.front()].id + "'");
      continue;
    }
    std::size_t n = horizon.value_or(default_horizon(agents, who));
    if (!check_handshake_wellposed(agents, who, label, n)) {
      out.push_back("handshake action '" + label + "' is not well-posed: its sharers cannot meet on a "
                    "region enabling it within " + std::to_string(n) + " steps");
    }
  }
  return out;
}

}  // namespace coplan
