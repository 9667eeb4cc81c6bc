#include <coplan/mdp.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_set>

namespace coplan {

namespace {

std::string format_probability(double p) {
  std::ostringstream out;
  out.precision(12);
  out << p;
  return out.str();
}

std::uint64_t row_key(StateIndex s, ActionIndex a) {
  return (static_cast<std::uint64_t>(s) << 32) | a;
}

}  // namespace

Distribution::Distribution(std::vector<Transition> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw ModelError("distribution has empty support");
  }
  std::unordered_set<StateIndex> seen;
  double sum = 0.0;
  for (const auto& t : entries_) {
    if (!(t.probability > 0.0) || t.probability > 1.0 + kRowSumTolerance) {
      throw ModelError("probability " + format_probability(t.probability) + " outside (0, 1]");
    }
    if (!seen.insert(t.target).second) {
      throw ModelError("duplicate successor " + std::to_string(t.target) + " in distribution");
    }
    sum += t.probability;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    throw ModelError("distribution sums to " + format_probability(sum));
  }
}

double Distribution::probability(StateIndex target) const noexcept {
  for (const auto& t : entries_) {
    if (t.target == target) return t.probability;
  }
  return 0.0;
}

double Distribution::total() const noexcept {
  double sum = 0.0;
  for (const auto& t : entries_) sum += t.probability;
  return sum;
}

const Choice* Mdp::find_choice(StateIndex s, ActionIndex a) const {
  const auto& cs = choices_.at(s);
  auto it = std::lower_bound(cs.begin(), cs.end(), a,
                             [](const Choice& c, ActionIndex x) { return c.action < x; });
  if (it == cs.end() || it->action != a) return nullptr;
  return &*it;
}

std::optional<StateIndex> Mdp::find_state(std::string_view label) const {
  auto it = state_lookup_.find(std::string(label));
  if (it == state_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionIndex> Mdp::find_action(std::string_view label) const {
  auto it = action_lookup_.find(std::string(label));
  if (it == action_lookup_.end()) return std::nullopt;
  return it->second;
}

StateIndex MdpBuilder::add_state(std::string label) {
  auto index = static_cast<StateIndex>(state_labels_.size());
  if (!state_lookup_.emplace(label, index).second) {
    throw ModelError("duplicate state '" + label + "'");
  }
  state_labels_.push_back(std::move(label));
  return index;
}

ActionIndex MdpBuilder::add_action(std::string label, ActionKind kind) {
  auto index = static_cast<ActionIndex>(actions_.size());
  if (!action_lookup_.emplace(label, index).second) {
    throw ModelError("duplicate action '" + label + "'");
  }
  actions_.push_back(Action{std::move(label), kind});
  return index;
}

void MdpBuilder::set_initial(StateIndex s) {
  if (s >= state_labels_.size()) {
    throw ModelError("initial state index " + std::to_string(s) + " out of range");
  }
  initial_ = s;
}

void MdpBuilder::add_transition(StateIndex from, ActionIndex action, StateIndex to,
                                double probability) {
  if (from >= state_labels_.size() || to >= state_labels_.size()) {
    throw ModelError("transition references unknown state index");
  }
  if (action >= actions_.size()) {
    throw ModelError("transition references unknown action index");
  }
  if (!std::isfinite(probability) || probability < 0.0 || probability > 1.0 + kRowSumTolerance) {
    throw ModelError("row (" + state_labels_[from] + ", " + actions_[action].label +
                     "): probability " + format_probability(probability) + " outside [0, 1]");
  }
  auto key = row_key(from, action);
  auto [it, inserted] = row_lookup_.emplace(key, rows_.size());
  if (inserted) rows_.push_back(Row{from, action, {}});
  Row& row = rows_[it->second];
  for (const auto& t : row.entries) {
    if (t.target == to) {
      throw ModelError("duplicate transition (" + state_labels_[from] + ", " +
                       actions_[action].label + ", " + state_labels_[to] + ")");
    }
  }
  if (probability == 0.0) return;
  row.entries.push_back(Transition{to, probability});
}

std::optional<StateIndex> MdpBuilder::find_state(std::string_view label) const {
  auto it = state_lookup_.find(std::string(label));
  if (it == state_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionIndex> MdpBuilder::find_action(std::string_view label) const {
  auto it = action_lookup_.find(std::string(label));
  if (it == action_lookup_.end()) return std::nullopt;
  return it->second;
}

Mdp MdpBuilder::build() && {
  if (state_labels_.empty()) throw ModelError("model has no states");
  if (!initial_) throw ModelError("model has no initial state");

  Mdp m;
  m.choices_.resize(state_labels_.size());
  for (auto& row : rows_) {
    double sum = 0.0;
    for (const auto& t : row.entries) sum += t.probability;
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw ModelError("row (" + state_labels_[row.state] + ", " + actions_[row.action].label +
                       "): probabilities sum to " + format_probability(sum));
    }
    m.choices_[row.state].push_back(Choice{row.action, Distribution(std::move(row.entries))});
  }
  for (StateIndex s = 0; s < state_labels_.size(); ++s) {
    auto& cs = m.choices_[s];
    if (cs.empty()) {
      throw ModelError("state '" + state_labels_[s] + "' has no enabled action (deadlock)");
    }
    std::sort(cs.begin(), cs.end(),
              [](const Choice& a, const Choice& b) { return a.action < b.action; });
    m.num_choices_ += cs.size();
  }
  m.state_labels_ = std::move(state_labels_);
  m.actions_ = std::move(actions_);
  m.initial_ = *initial_;
  m.state_lookup_ = std::move(state_lookup_);
  m.action_lookup_ = std::move(action_lookup_);
  rows_.clear();
  row_lookup_.clear();
  return m;
}

Mdp build_mdp(const RawMdp& raw) {
  MdpBuilder b;
  for (const auto& s : raw.states) b.add_state(s);
  for (const auto& a : raw.actions) b.add_action(a.label, a.kind);
  auto initial = b.find_state(raw.initial);
  if (!initial) throw ModelError("unknown initial state '" + raw.initial + "'");
  b.set_initial(*initial);
  for (const auto& t : raw.transitions) {
    auto from = b.find_state(t.from);
    auto to = b.find_state(t.to);
    auto action = b.find_action(t.action);
    if (!from) throw ModelError("transition references unknown state '" + t.from + "'");
    if (!to) throw ModelError("transition references unknown state '" + t.to + "'");
    if (!action) throw ModelError("transition references unknown action '" + t.action + "'");
    b.add_transition(*from, *action, *to, t.probability);
  }
  return std::move(b).build();
}

std::vector<ActionIndex> available_actions(const Mdp& m, StateIndex s) {
  if (s >= m.num_states()) throw ModelError("unknown state index " + std::to_string(s));
  std::vector<ActionIndex> out;
  for (const auto& c : m.choices(s)) out.push_back(c.action);
  return out;
}

std::vector<StateIndex> post_states(const Mdp& m, StateIndex s, ActionIndex a) {
  if (s >= m.num_states()) throw ModelError("unknown state index " + std::to_string(s));
  const Choice* c = m.find_choice(s, a);
  if (c == nullptr) {
    throw ModelError("action '" + (a < m.num_actions() ? m.action(a).label : std::to_string(a)) +
                     "' not available at state '" + m.state_label(s) + "'");
  }
  std::vector<StateIndex> out;
  for (const auto& t : c->distribution.entries()) out.push_back(t.target);
  return out;
}

TransitionMatrix transition_matrix(const Mdp& m) {
  TransitionMatrix t;
  t.rows = m.num_choices();
  t.cols = m.num_states();
  t.values.assign(t.rows * t.cols, 0.0);
  std::size_t r = 0;
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    for (const auto& c : m.choices(s)) {
      t.row_keys.emplace_back(s, c.action);
      for (const auto& e : c.distribution.entries()) t.values[r * t.cols + e.target] = e.probability;
      ++r;
    }
  }
  return t;
}

Dtmc::Dtmc(std::vector<std::string> state_labels, StateIndex initial, std::vector<Distribution> rows)
    : state_labels_(std::move(state_labels)), initial_(initial), rows_(std::move(rows)) {
  if (state_labels_.size() != rows_.size()) {
    throw ModelError("chain has " + std::to_string(rows_.size()) + " rows for " +
                     std::to_string(state_labels_.size()) + " states");
  }
  if (initial_ >= rows_.size()) throw ModelError("chain initial state out of range");
  for (const auto& row : rows_) {
    if (row.size() == 0) throw ModelError("chain row has empty support");
    for (const auto& t : row.entries()) {
      if (t.target >= rows_.size()) throw ModelError("chain row references unknown state");
    }
  }
}

Dtmc induce_dtmc(const Mdp& m, const StationaryPolicy& policy) {
  if (policy.choice.size() != m.num_states()) {
    throw ModelError("policy covers " + std::to_string(policy.choice.size()) + " of " +
                     std::to_string(m.num_states()) + " states");
  }
  std::vector<Distribution> rows;
  rows.reserve(m.num_states());
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    const Choice* c = m.find_choice(s, policy.choice[s]);
    if (c == nullptr) {
      throw ModelError("policy picks an unavailable action at state '" + m.state_label(s) + "'");
    }
    rows.push_back(c->distribution);
  }
  return Dtmc({m.state_labels().begin(), m.state_labels().end()}, m.initial(), std::move(rows));
}

Mdp as_mdp(const Dtmc& d, std::string label) {
  MdpBuilder b;
  for (const auto& s : d.state_labels()) b.add_state(s);
  auto a = b.add_action(std::move(label), ActionKind::independent);
  b.set_initial(d.initial());
  for (StateIndex s = 0; s < d.num_states(); ++s) {
    for (const auto& t : d.row(s).entries()) b.add_transition(s, a, t.target, t.probability);
  }
  return std::move(b).build();
}

double finite_path_probability(const Dtmc& d, std::span<const StateIndex> path) {
  if (path.empty()) throw ModelError("path must contain at least one state");
  for (auto s : path) {
    if (s >= d.num_states()) throw ModelError("path references unknown state " + std::to_string(s));
  }
  double p = 1.0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    p *= d.probability(path[k], path[k + 1]);
    if (p == 0.0) break;
  }
  return p;
}

bool is_feasible(const Mdp& m, const FinitePath& path) {
  if (path.states.empty()) return false;
  if (!path.actions.empty() && path.actions.size() != path.states.size() - 1) return false;
  for (auto s : path.states) {
    if (s >= m.num_states()) return false;
  }
  for (std::size_t k = 0; k + 1 < path.states.size(); ++k) {
    auto from = path.states[k];
    auto to = path.states[k + 1];
    if (path.actions.empty()) {
      bool any = false;
      for (const auto& c : m.choices(from)) any = any || c.distribution.probability(to) > 0.0;
      if (!any) return false;
    } else {
      const Choice* c = m.find_choice(from, path.actions[k]);
      if (c == nullptr || c->distribution.probability(to) <= 0.0) return false;
    }
  }
  return true;
}

std::vector<bool> reachable_states(const Mdp& m, StateIndex from) {
  std::vector<bool> seen(m.num_states(), false);
  std::deque<StateIndex> queue{from};
  seen.at(from) = true;
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    for (const auto& c : m.choices(s)) {
      for (const auto& t : c.distribution.entries()) {
        if (!seen[t.target]) {
          seen[t.target] = true;
          queue.push_back(t.target);
        }
      }
    }
  }
  return seen;
}

}  // namespace coplan
