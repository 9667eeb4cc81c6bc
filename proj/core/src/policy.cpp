#include <coplan/policy.hpp>

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <map>
#include <thread>

namespace coplan {

namespace {

std::size_t choice_position(const Mdp& m, StateIndex s, ActionIndex a) {
  auto cs = m.choices(s);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    if (cs[k].action == a) return k;
  }
  throw ModelError("action '" + m.action(a).label + "' not available at state '" + m.state_label(s) + "'");
}

std::vector<bool> reachable_under(const Mdp& m, const TeamPolicy& tp) {
  std::vector<bool> seen(m.num_states(), false);
  std::deque<StateIndex> queue{m.initial()};
  seen[m.initial()] = true;
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    if (!tp.defined(s)) continue;
    const Choice* c = m.find_choice(s, tp.choice[s]);
    if (c == nullptr) continue;
    for (const auto& t : c->distribution.entries()) {
      if (!seen[t.target]) {
        seen[t.target] = true;
        queue.push_back(t.target);
      }
    }
  }
  return seen;
}

// Evaluates a formula under a fixed policy; operand Sat sets of probability
// operators depend only on the model and are computed once.
class PolicyEvaluator {
public:
  PolicyEvaluator(const Mdp& m, pctl::StateFormula formula, const SynthesisConfig& config)
      : m_(m), formula_(pctl::is_core(formula) ? std::move(formula) : pctl::rewrite_derived(formula)),
        config_(config) {}

  PolicyEvaluation run(const StationaryPolicy& policy) {
    chain_ = restrict_to_policy(m_, policy);
    PolicyEvaluation out;
    out.sat = eval(formula_, out.probabilities);
    out.holds = out.sat[m_.initial()];
    return out;
  }

private:
  struct Operands {
    StateSet lhs;
    StateSet rhs;
  };

  const Operands& operands(const pctl::PathFormula& path) {
    auto it = cache_.find(path.get());
    if (it != cache_.end()) return it->second;
    Operands ops;
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, pctl::Next>) {
            ops.rhs = sat_states(m_, node.operand, config_).states;
          } else if constexpr (std::is_same_v<T, pctl::Until>) {
            ops.lhs = sat_states(m_, node.lhs, config_).states;
            ops.rhs = sat_states(m_, node.rhs, config_).states;
          } else if constexpr (std::is_same_v<T, pctl::Eventually>) {
            ops.lhs.assign(m_.num_states(), true);
            ops.rhs = sat_states(m_, node.operand, config_).states;
          } else {
            throw std::logic_error("G must be rewritten at its probability operator before evaluation");
          }
        },
        path->node);
    return cache_.emplace(path.get(), std::move(ops)).first->second;
  }

  StateSet eval(const pctl::StateFormula& f, std::vector<ProbReport>& reports) {
    if (const auto* n = std::get_if<pctl::Not>(&f->node)) {
      auto s = eval(n->operand, reports);
      s.flip();
      return s;
    }
    if (const auto* a = std::get_if<pctl::And>(&f->node)) {
      auto l = eval(a->lhs, reports);
      auto r = eval(a->rhs, reports);
      for (std::size_t s = 0; s < l.size(); ++s) l[s] = l[s] && r[s];
      return l;
    }
    if (const auto* p = std::get_if<pctl::Prob>(&f->node)) {
      const auto& ops = operands(p->path);
      ExtremalResult ext;
      bool unbounded = false;
      if (std::holds_alternative<pctl::Next>(p->path->node)) {
        ext = prob_next_extremal(chain_, ops.rhs, OptimizationMode::max, config_.tie_tolerance);
      } else {
        pctl::Bound bound;
        if (const auto* u = std::get_if<pctl::Until>(&p->path->node)) bound = u->bound;
        if (const auto* e = std::get_if<pctl::Eventually>(&p->path->node)) bound = e->bound;
        auto part = until_partition(ops.lhs, ops.rhs);
        if (bound) {
          ext = prob_bounded_until_extremal(chain_, part, *bound, OptimizationMode::max, config_.tie_tolerance);
        } else {
          unbounded = true;
          ext = prob_unbounded_until_extremal(chain_, part, OptimizationMode::max, config_);
        }
      }
      StateSet sat(m_.num_states(), false);
      for (StateIndex s = 0; s < m_.num_states(); ++s) {
        sat[s] = pctl::compare(ext.values[s], p->comparator, p->threshold, config_.tie_tolerance);
      }
      ProbReport r;
      r.formula = pctl::to_string(f);
      r.comparator = p->comparator;
      r.threshold = p->threshold;
      r.value = ext.values[m_.initial()];
      r.holds = sat[m_.initial()];
      r.unbounded = unbounded;
      r.iterations = ext.iterations;
      r.residual = ext.residual;
      r.converged = ext.converged;
      reports.push_back(std::move(r));
      return sat;
    }
    return sat_states(m_, f, config_).states;
  }

  const Mdp& m_;
  pctl::StateFormula formula_;
  SynthesisConfig config_;
  Mdp chain_;
  std::map<const pctl::PathNode*, Operands> cache_;
};

std::vector<FormulaReport> agent_reports(std::span<const Agent> agents, std::span<const AgentIndex> members,
                                         const Mdp& m, const StationaryPolicy& policy,
                                         const SynthesisConfig& config) {
  std::vector<FormulaReport> out;
  for (auto i : members) {
    const Agent& agent = agents[i];
    if (!agent.formula) continue;
    auto eval = evaluate_policy(m, policy, agent.formula, config);
    out.push_back(FormulaReport{agent.id, agent.formula_text, eval.holds, std::move(eval.probabilities)});
  }
  return out;
}

}  // namespace

StationaryPolicy to_stationary(const TeamPolicy& tp, const Mdp& m) {
  if (tp.choice.size() != m.num_states()) throw ModelError("team policy does not match the product state count");
  StationaryPolicy out;
  out.choice.resize(m.num_states());
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    out.choice[s] = tp.defined(s) ? tp.choice[s] : m.choices(s).front().action;
  }
  return out;
}

Mdp restrict_to_policy(const Mdp& m, const StationaryPolicy& policy) {
  if (policy.choice.size() != m.num_states()) throw ModelError("policy does not match the state count");
  MdpBuilder b;
  for (const auto& label : m.state_labels()) b.add_state(label);
  for (const auto& a : m.actions()) b.add_action(a.label, a.kind);
  b.set_initial(m.initial());
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    const Choice* c = m.find_choice(s, policy.choice[s]);
    if (c == nullptr) throw ModelError("policy picks an unavailable action at state '" + m.state_label(s) + "'");
    for (const auto& t : c->distribution.entries()) b.add_transition(s, c->action, t.target, t.probability);
  }
  return std::move(b).build();
}

std::size_t SpSet::size() const {
  if (empty) return 0;
  std::size_t total = 1;
  for (auto s : domain) {
    if (__builtin_mul_overflow(total, allowed.per_state[s].size(), &total)) {
      return std::numeric_limits<std::size_t>::max();
    }
  }
  return total;
}

SpSet make_sp_set(const Mdp& m, const pctl::StateFormula& formula, const SynthesisConfig& config,
                  std::size_t cluster) {
  SpSet sp;
  sp.cluster = cluster;
  sp.allowed = synthesize_formula_actions(m, formula, config);
  for (auto& acts : sp.allowed.per_state) {
    std::sort(acts.begin(), acts.end(),
              [&](ActionIndex a, ActionIndex b) { return m.action(a).label < m.action(b).label; });
  }
  if (sp.allowed.empty_at(m.initial())) {
    sp.empty = true;
    return sp;
  }
  std::vector<bool> seen(m.num_states(), false);
  std::deque<StateIndex> queue{m.initial()};
  seen[m.initial()] = true;
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    auto& acts = sp.allowed.per_state[s];
    if (acts.empty()) {
      for (const auto& c : m.choices(s)) acts.push_back(c.action);
      std::sort(acts.begin(), acts.end(),
                [&](ActionIndex a, ActionIndex b) { return m.action(a).label < m.action(b).label; });
      sp.relaxed.push_back(s);
    }
    for (auto a : acts) {
      for (const auto& t : m.find_choice(s, a)->distribution.entries()) {
        if (!seen[t.target]) {
          seen[t.target] = true;
          queue.push_back(t.target);
        }
      }
    }
  }
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    if (seen[s]) sp.domain.push_back(s);
  }
  std::sort(sp.relaxed.begin(), sp.relaxed.end());
  return sp;
}

PolicyEnumerator::PolicyEnumerator(const SpSet& sp, std::size_t num_states, std::size_t limit)
    : sp_(&sp), num_states_(num_states), limit_(limit), cursor_(sp.domain.size(), 0) {
  if (limit == 0) throw std::invalid_argument("policy enumeration limit must be at least 1");
  done_ = sp.empty;
}

std::optional<TeamPolicy> PolicyEnumerator::next() {
  if (done_) return std::nullopt;
  if (produced_ == limit_) {
    capped_ = true;
    return std::nullopt;
  }
  TeamPolicy tp;
  tp.cluster = sp_->cluster;
  tp.choice.assign(num_states_, kNoAction);
  for (std::size_t k = 0; k < cursor_.size(); ++k) {
    auto s = sp_->domain[k];
    tp.choice[s] = sp_->allowed.per_state[s][cursor_[k]];
  }
  ++produced_;
  bool wrapped = true;
  for (std::size_t k = cursor_.size(); k-- > 0;) {
    if (++cursor_[k] < sp_->allowed.per_state[sp_->domain[k]].size()) {
      wrapped = false;
      break;
    }
    cursor_[k] = 0;
  }
  if (wrapped) done_ = true;
  return tp;
}

std::vector<TeamPolicy> enumerate_team_policies(const SpSet& sp, std::size_t num_states, std::size_t limit) {
  PolicyEnumerator e(sp, num_states, limit);
  std::vector<TeamPolicy> out;
  while (auto tp = e.next()) out.push_back(std::move(*tp));
  return out;
}

std::set<ActionIndex> succ_actions(const TeamPolicy& tp, const Mdp& m) {
  std::set<ActionIndex> out;
  for (auto a : tp.choice) {
    if (a != kNoAction && m.action(a).kind == ActionKind::handshake) out.insert(a);
  }
  return out;
}

SuccessReport is_successful(const TeamPolicy& tp, const ProductMdp& p, bool strict) {
  const Mdp& m = p.model();
  SuccessReport report;
  std::vector<bool> scope = strict ? std::vector<bool>(m.num_states(), true) : reachable_under(m, tp);
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    if (!scope[s] || !tp.defined(s)) continue;
    const ActionIndex a = tp.choice[s];
    if (m.action(a).kind != ActionKind::handshake) continue;
    const MoverMask sharers = p.sharers(a);
    if ((p.movers(s, choice_position(m, s, a)) & sharers) != sharers) {
      report.violations.push_back({s, a, "a sharer cannot execute the action here"});
    } else if (!sharers_colocated(p, s, sharers)) {
      report.violations.push_back({s, a, "sharers stand on different regions"});
    }
  }
  report.successful = report.violations.empty();
  return report;
}

std::vector<AgentPolicy> project_policy(const TeamPolicy& tp, const ProductMdp& p, std::span<const Agent> agents) {
  const Mdp& m = p.model();
  std::vector<AgentPolicy> out;
  for (std::size_t j = 0; j < p.arity(); ++j) {
    AgentPolicy ap;
    ap.agent = p.members()[j];
    ap.agent_id = agents[ap.agent].id;
    ap.cluster = tp.cluster;
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      if (!tp.defined(s)) continue;
      const ActionIndex a = tp.choice[s];
      const bool moves = (p.movers(s, choice_position(m, s, a)) >> j) & 1U;
      ap.entries.push_back(LocalPolicyEntry{s, m.state_label(s), p.component_label(s, j),
                                            moves ? m.action(a).label : std::string{}});
    }
    out.push_back(std::move(ap));
  }
  return out;
}

PolicyEvaluation evaluate_policy(const Mdp& m, const StationaryPolicy& policy, const pctl::StateFormula& formula,
                                 const SynthesisConfig& config) {
  return PolicyEvaluator(m, formula, config).run(policy);
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::solved:
      return "solved";
    case SolveStatus::no_solution:
      return "no_solution";
    case SolveStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

const ClusterSolution* SolutionBundle::failing_cluster() const {
  for (const auto& c : clusters) {
    if (c.status == status && status != SolveStatus::solved) return &c;
  }
  return nullptr;
}

ClusterSolution solve_cluster(std::span<const Agent> agents, std::span<const AgentIndex> members, std::size_t index,
                              const SolveConfig& config) {
  ClusterSolution out;
  out.index = index;
  out.members.assign(members.begin(), members.end());
  std::sort(out.members.begin(), out.members.end());
  out.product = build_product(agents, out.members, config.product);
  const Mdp& m = out.product->model();
  const auto formula = mutual_formula(agents, out.members);

  const SpSet sp = make_sp_set(m, formula, config.synthesis, index);
  out.sp_size = sp.size();
  out.relaxed = sp.relaxed;
  if (sp.empty) {
    out.status = SolveStatus::no_solution;
    out.reason = "no action at the initial joint state meets the cluster formula";
    return out;
  }

  PolicyEvaluator evaluator(m, formula, config.synthesis);
  PolicyEnumerator candidates(sp, m.num_states(), config.max_policies);
  std::size_t unsuccessful = 0;
  while (auto tp = candidates.next()) {
    ++out.policies_checked;
    if (!is_successful(*tp, *out.product, config.strict_success).successful) {
      ++unsuccessful;
      continue;
    }
    auto stationary = to_stationary(*tp, m);
    if (!evaluator.run(stationary).holds) continue;
    out.status = SolveStatus::solved;
    out.reports = agent_reports(agents, out.members, m, stationary, config.synthesis);
    out.policy = std::move(*tp);
    return out;
  }
  if (candidates.capped()) {
    out.status = SolveStatus::inconclusive;
    out.reason = "enumeration limit of " + std::to_string(config.max_policies) + " policies reached";
  } else {
    out.status = SolveStatus::no_solution;
    out.reason = "all " + std::to_string(out.policies_checked) + " candidate policies rejected (" +
                 std::to_string(unsuccessful) + " unsuccessful handshakes)";
  }
  return out;
}

SolutionBundle solve_problem1(std::span<const Agent> agents, const SolveConfig& config) {
  if (agents.empty()) throw ModelError("team has no agents");
  validate_action_partition(agents);

  SolutionBundle bundle;
  bundle.clustering = compute_clusters(build_dependency_graph(agents, config.dependency));
  const std::size_t n = bundle.clustering.size();
  bundle.clusters.resize(n);

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < n; c = next++) {
      try {
        bundle.clusters[c] = solve_cluster(agents, bundle.clustering.clusters[c], c, config);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1U, std::min<unsigned>(config.jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  bundle.status = SolveStatus::solved;
  for (const auto& c : bundle.clusters) {
    if (c.status == SolveStatus::no_solution) bundle.status = SolveStatus::no_solution;
    if (c.status == SolveStatus::inconclusive && bundle.status == SolveStatus::solved) {
      bundle.status = SolveStatus::inconclusive;
    }
  }
  if (bundle.status == SolveStatus::solved) {
    for (const auto& c : bundle.clusters) {
      for (auto& ap : project_policy(*c.policy, *c.product, agents)) bundle.agent_policies.push_back(std::move(ap));
    }
    std::sort(bundle.agent_policies.begin(), bundle.agent_policies.end(),
              [](const AgentPolicy& a, const AgentPolicy& b) { return a.agent < b.agent; });
  }
  return bundle;
}

}  // namespace coplan
