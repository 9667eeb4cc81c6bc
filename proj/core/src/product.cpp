#include <coplan/product.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>

namespace coplan {

namespace {

struct JointRow {
  ActionIndex action;
  MoverMask movers;
  std::vector<std::pair<std::uint64_t, double>> successors;  // encoded tuple, probability
};

class TupleCodec {
public:
  explicit TupleCodec(std::vector<std::size_t> radix) : radix_(std::move(radix)) {
    total_ = 1;
    for (auto r : radix_) {
      if (__builtin_mul_overflow(total_, static_cast<std::uint64_t>(r), &total_)) {
        throw ProductError("joint state space exceeds 2^64 states");
      }
    }
  }

  std::uint64_t total() const noexcept { return total_; }

  std::uint64_t encode(std::span<const StateIndex> t) const {
    std::uint64_t code = 0;
    for (std::size_t j = 0; j < radix_.size(); ++j) code = code * radix_[j] + t[j];
    return code;
  }

  std::vector<StateIndex> decode(std::uint64_t code) const {
    std::vector<StateIndex> t(radix_.size());
    for (std::size_t j = radix_.size(); j-- > 0;) {
      t[j] = static_cast<StateIndex>(code % radix_[j]);
      code /= radix_[j];
    }
    return t;
  }

private:
  std::vector<std::size_t> radix_;
  std::uint64_t total_ = 1;
};

}  // namespace

bool sharers_colocated(const ProductMdp& p, StateIndex s, MoverMask sharers) {
  const std::string* region = nullptr;
  for (std::size_t j = 0; j < p.arity(); ++j) {
    if (!(sharers & (MoverMask{1} << j))) continue;
    const std::string& here = p.component_label(s, j);
    if (region != nullptr && *region != here) return false;
    region = &here;
  }
  return true;
}

MoverMask ProductMdp::all_members() const noexcept {
  return members_.size() >= 64 ? ~MoverMask{0} : (MoverMask{1} << members_.size()) - 1;
}

ProductMdp build_product(std::span<const Agent> agents, std::span<const AgentIndex> members,
                         const ProductOptions& options) {
  if (members.empty()) throw ProductError("cannot build the product of an empty cluster");
  if (members.size() > 63) throw ProductError("clusters are limited to 63 agents");

  ProductMdp p;
  p.members_.assign(members.begin(), members.end());
  std::sort(p.members_.begin(), p.members_.end());
  p.pruned_ = options.prune_unreachable;
  const std::size_t arity = p.members_.size();
  const bool singleton = arity == 1;

  // Product action alphabet: union of the members' labels, first-seen order.
  MdpBuilder builder;
  for (std::size_t j = 0; j < arity; ++j) {
    const Mdp& m = agents[p.members_[j]].mdp;
    for (ActionIndex a = 0; a < m.num_actions(); ++a) {
      const Action& act = m.action(a);
      auto existing = builder.find_action(act.label);
      ActionIndex pa;
      if (existing) {
        pa = *existing;
      } else {
        pa = builder.add_action(act.label, act.kind);
        p.local_actions_.emplace_back(arity);
        p.sharers_.push_back(0);
      }
      p.local_actions_[pa][j] = a;
      if (act.kind == ActionKind::handshake) p.sharers_[pa] |= MoverMask{1} << j;
    }
  }
  const auto num_actions = static_cast<ActionIndex>(p.local_actions_.size());

  std::vector<std::size_t> radix;
  for (auto i : p.members_) {
    radix.push_back(agents[i].mdp.num_states());
    const auto labels = agents[i].mdp.state_labels();
    p.member_labels_.emplace_back(labels.begin(), labels.end());
  }
  TupleCodec codec(radix);
  p.full_state_count_ = codec.total();

  auto expand = [&](std::span<const StateIndex> tuple) {
    std::vector<JointRow> rows;
    for (ActionIndex a = 0; a < num_actions; ++a) {
      MoverMask enabled = 0;
      std::vector<const Choice*> local(arity, nullptr);
      for (std::size_t j = 0; j < arity; ++j) {
        auto la = p.local_actions_[a][j];
        if (!la) continue;
        local[j] = agents[p.members_[j]].mdp.find_choice(tuple[j], *la);
        if (local[j] != nullptr) enabled |= MoverMask{1} << j;
      }
      if (enabled == 0) continue;
      // A handshake cannot fire while one of its sharers has it disabled.
      if ((p.sharers_[a] & ~enabled) != 0) continue;

      JointRow row{a, enabled, {}};
      std::vector<StateIndex> next(tuple.begin(), tuple.end());
      // Odometer over the movers' successor lists.
      std::vector<std::size_t> movers;
      for (std::size_t j = 0; j < arity; ++j) {
        if (enabled & (MoverMask{1} << j)) movers.push_back(j);
      }
      std::vector<std::size_t> pos(movers.size(), 0);
      while (true) {
        double prob = 1.0;
        for (std::size_t m = 0; m < movers.size(); ++m) {
          const auto& t = local[movers[m]]->distribution.entries()[pos[m]];
          next[movers[m]] = t.target;
          prob *= t.probability;
        }
        row.successors.emplace_back(codec.encode(next), prob);
        bool exhausted = true;
        for (std::size_t m = movers.size(); m-- > 0;) {
          if (++pos[m] < local[movers[m]]->distribution.size()) {
            exhausted = false;
            break;
          }
          pos[m] = 0;
        }
        if (exhausted) break;
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };

  std::vector<StateIndex> initial_tuple;
  for (auto i : p.members_) initial_tuple.push_back(agents[i].mdp.initial());
  const std::uint64_t initial_code = codec.encode(initial_tuple);

  std::map<std::uint64_t, std::vector<JointRow>> discovered;  // ordered = lexicographic
  if (options.prune_unreachable) {
    std::deque<std::uint64_t> queue{initial_code};
    discovered.emplace(initial_code, std::vector<JointRow>{});
    while (!queue.empty()) {
      auto code = queue.front();
      queue.pop_front();
      auto rows = expand(codec.decode(code));
      for (const auto& r : rows) {
        for (const auto& [succ, prob] : r.successors) {
          if (discovered.emplace(succ, std::vector<JointRow>{}).second) queue.push_back(succ);
        }
      }
      discovered[code] = std::move(rows);
    }
  } else {
    for (std::uint64_t code = 0; code < codec.total(); ++code) discovered.emplace(code, expand(codec.decode(code)));
  }

  std::unordered_map<std::uint64_t, StateIndex> index_of;
  for (const auto& [code, rows] : discovered) {
    auto tuple = codec.decode(code);
    std::string label;
    if (singleton) {
      label = agents[p.members_[0]].mdp.state_label(tuple[0]);
    } else {
      label = "(";
      for (std::size_t j = 0; j < arity; ++j) {
        if (j > 0) label += "|";
        label += agents[p.members_[j]].mdp.state_label(tuple[j]);
      }
      label += ")";
    }
    if (rows.empty()) {
      throw ProductError("joint state " + label + " has no enabled transition: every available action "
                         "is a handshake that some sharer cannot take there");
    }
    index_of.emplace(code, builder.add_state(std::move(label)));
    p.components_.push_back(std::move(tuple));
  }
  builder.set_initial(index_of.at(initial_code));

  p.movers_.resize(discovered.size());
  for (const auto& [code, rows] : discovered) {
    StateIndex s = index_of.at(code);
    for (const auto& r : rows) {
      for (const auto& [succ, prob] : r.successors) builder.add_transition(s, r.action, index_of.at(succ), prob);
      p.movers_[s].push_back(r.movers);  // rows are in action order, matching Mdp choice order
    }
  }
  p.model_ = std::move(builder).build();
  return p;
}

pctl::StateFormula mutual_formula(std::span<const Agent> agents, std::span<const AgentIndex> members) {
  std::vector<AgentIndex> order(members.begin(), members.end());
  std::sort(order.begin(), order.end());
  std::set<std::string> alphabet;
  for (auto i : order) {
    for (const auto& a : agents[i].mdp.actions()) alphabet.insert(a.label);
  }
  pctl::StateFormula out;
  for (auto i : order) {
    if (!agents[i].formula) continue;
    for (const auto& atom : pctl::atoms_of(agents[i].formula)) {
      if (!alphabet.count(atom)) {
        throw ModelError("formula of agent '" + agents[i].id + "' refers to action '" + atom +
                         "' which no agent of its cluster declares");
      }
    }
    out = out ? pctl::make_and(out, agents[i].formula) : agents[i].formula;
  }
  return out ? out : pctl::make_true();
}

std::vector<StateIndex> handshake_enabled_states(const ProductMdp& p, std::string_view action) {
  const Mdp& m = p.model();
  auto a = m.find_action(action);
  if (!a || m.action(*a).kind != ActionKind::handshake) {
    throw ModelError("'" + std::string(action) + "' is not a handshake action of this cluster");
  }
  const MoverMask sharers = p.sharers(*a);
  std::vector<StateIndex> out;
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    auto cs = m.choices(s);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (cs[k].action != *a || (p.movers(s, k) & sharers) != sharers) continue;
      if (sharers_colocated(p, s, sharers)) out.push_back(s);
      break;
    }
  }
  return out;
}

std::vector<AgentIndex> mask_members(const ProductMdp& p, MoverMask mask) {
  std::vector<AgentIndex> out;
  for (std::size_t j = 0; j < p.arity(); ++j) {
    if (mask & (MoverMask{1} << j)) out.push_back(p.members()[j]);
  }
  return out;
}

}  // namespace coplan
