#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace coplan::cli {

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ProductError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInvalidInput;
}

std::string agent_set(std::span<const AgentIndex> members) {
  std::string s = "{";
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (k > 0) s += ",";
    s += std::to_string(members[k] + 1);
  }
  return s + "}";
}

DependencyOptions dependency_options(std::optional<std::size_t> horizon, bool require_meeting) {
  DependencyOptions d;
  d.horizon = horizon;
  d.rule = require_meeting ? DependencyRule::shared_action_and_meeting : DependencyRule::shared_action;
  return d;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot write '" + path + "'");
  f << text;
}

// Probability operators reached from the root through negation and
// conjunction only.
void top_level_probs(const pctl::StateFormula& f, std::vector<pctl::StateFormula>& out) {
  if (const auto* n = std::get_if<pctl::Not>(&f->node)) {
    top_level_probs(n->operand, out);
  } else if (const auto* a = std::get_if<pctl::And>(&f->node)) {
    top_level_probs(a->lhs, out);
    top_level_probs(a->rhs, out);
  } else if (std::holds_alternative<pctl::Prob>(f->node)) {
    out.push_back(f);
  }
}

void print_prob(std::ostream& out, const ProbReport& r) {
  out << "    " << r.formula << "  value " << format_probability(r.value) << (r.holds ? "  holds" : "  fails");
  if (r.unbounded) {
    out << "  [iterations " << r.iterations << ", residual " << format_probability(r.residual)
        << (r.converged ? "" : ", not converged") << "]";
  }
  out << '\n';
}

}  // namespace

std::string format_probability(double p) {
  std::ostringstream s;
  s.precision(12);
  s << p;
  return s.str();
}

unsigned default_jobs() {
  const char* env = std::getenv("COPLAN_JOBS");
  if (env == nullptr) return 1;
  char* end = nullptr;
  unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0' || v == 0 || v > 1024) return 1;
  return static_cast<unsigned>(v);
}

int cmd_validate(const std::string& model, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto agents = load_model(model);
    validate_action_partition(agents);
    auto clustering = compute_clusters(build_dependency_graph(agents));
    for (const auto& c : clustering.clusters) mutual_formula(agents, c);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const auto& a = agents[i];
      out << "agent " << (i + 1) << " '" << a.id << "': " << a.mdp.num_states() << " states, "
          << a.mdp.num_actions() << " actions, " << a.mdp.num_choices() << " state-action pairs";
      if (a.formula) out << ", formula " << pctl::to_string(a.formula);
      out << '\n';
    }
    for (const auto& w : coupling_warnings(agents, clustering)) out << "warning: " << w << '\n';
    out << "valid: " << agents.size() << " agents\n";
    return kSuccess;
  });
}

int cmd_cluster(const ClusterOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto agents = load_model(options.model);
    validate_action_partition(agents);
    auto graph = build_dependency_graph(agents, dependency_options(options.horizon, options.require_meeting));
    auto clustering = compute_clusters(graph);

    out << "edges:";
    for (auto [i, j] : graph.edges()) out << " {" << (i + 1) << "," << (j + 1) << "}";
    out << '\n';
    out << "clusters: " << clustering.size() << '\n';
    for (std::size_t c = 0; c < clustering.size(); ++c) {
      const auto& members = clustering.clusters[c];
      out << "  C" << (c + 1) << " = " << agent_set(members) << "  agents:";
      for (auto i : members) out << ' ' << agents[i].id;
      out << "  edges:";
      for (auto [i, j] : graph.edges()) {
        if (clustering.cluster_of[i] == c) out << " {" << (i + 1) << "," << (j + 1) << "}";
      }
      out << '\n';
    }
    out << "f:";
    for (std::size_t i = 0; i < agents.size(); ++i) out << " f(" << (i + 1) << ")=" << (clustering.cluster_of[i] + 1);
    out << '\n';

    std::vector<std::size_t> sizes;
    for (const auto& a : agents) sizes.push_back(a.mdp.num_states());
    auto report = estimate_state_counts(clustering, sizes);
    auto show = [](const StateCount& c) {
      if (c.exact) return std::to_string(*c.exact);
      std::ostringstream s;
      s.precision(6);
      s << "10^" << c.log10;
      return s.str();
    };
    out << "product states:";
    for (std::size_t c = 0; c < report.clusters.size(); ++c) out << " C" << (c + 1) << "=" << show(report.clusters[c]);
    out << "  centralized=" << show(report.centralized) << '\n';
    out << "ordering: max cluster product " << (report.strictly_smaller ? "<" : report.ordering_holds ? "<=" : ">")
        << " centralized\n";
    for (const auto& w : coupling_warnings(agents, clustering, options.horizon)) out << "warning: " << w << '\n';
    return kSuccess;
  });
}

int cmd_synthesize(const SynthesizeOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto agents = load_model(options.model);
    SolveConfig config;
    config.synthesis.mode = parse_threshold_mode(options.mode);
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("--epsilon must be positive");
    config.synthesis.epsilon = options.epsilon;
    if (options.max_policies == 0) throw std::invalid_argument("--max-policies must be at least 1");
    config.max_policies = options.max_policies;
    config.jobs = std::max(1U, options.jobs);
    config.strict_success = options.strict;
    config.dependency = dependency_options(options.horizon, options.require_meeting);

    auto bundle = solve_problem1(agents, config);
    out << "mode " << options.mode << "  epsilon " << format_probability(config.synthesis.epsilon) << '\n';
    for (const auto& c : bundle.clusters) {
      out << "cluster " << (c.index + 1) << " " << agent_set(c.members) << ": " << to_string(c.status) << "  ("
          << c.product->model().num_states() << " product states, " << c.policies_checked
          << " candidate policies checked";
      if (!c.relaxed.empty()) out << ", " << c.relaxed.size() << (c.relaxed.size() == 1 ? " relaxed state" : " relaxed states");
      out << ")\n";
      if (!c.reason.empty()) out << "  " << c.reason << '\n';
      for (const auto& r : c.reports) {
        out << "  " << r.agent_id << ": " << r.formula << (r.holds ? "  satisfied" : "  violated") << '\n';
        for (const auto& p : r.probabilities) print_prob(out, p);
      }
    }
    out << "status: " << to_string(bundle.status);
    if (const auto* failing = bundle.failing_cluster()) out << " (cluster " << (failing->index + 1) << ")";
    out << '\n';

    switch (bundle.status) {
      case SolveStatus::solved: {
        auto text = write_policy(make_policy_file(bundle, agents, config));
        if (options.out) {
          write_file(*options.out, text);
          out << "policy written to " << *options.out << '\n';
        }
        return kSuccess;
      }
      case SolveStatus::no_solution:
        return kNoSolution;
      case SolveStatus::inconclusive:
        return kInconclusive;
    }
    return kInternalError;
  });
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.trials == 0) throw std::invalid_argument("--trials must be at least 1");
    if (options.max_steps == 0) throw std::invalid_argument("--max-steps must be at least 1");
    auto agents = load_model(options.model);
    auto policy = load_policy(options.policy);
    SynthesisConfig synthesis;
    synthesis.mode = parse_threshold_mode(policy.mode);
    synthesis.epsilon = policy.epsilon;
    synthesis.tie_tolerance = policy.tie_tolerance;

    std::map<std::string, AgentIndex> index_of;
    for (AgentIndex i = 0; i < agents.size(); ++i) index_of.emplace(agents[i].id, i);

    std::ofstream trace_file;
    if (options.trace) {
      trace_file.open(*options.trace, std::ios::binary);
      if (!trace_file) throw FormatError("cannot write '" + *options.trace + "'");
    }

    std::vector<bool> covered(agents.size(), false);
    for (const auto& cp : policy.clusters) {
      std::vector<AgentIndex> members;
      for (const auto& id : cp.members) {
        auto it = index_of.find(id);
        if (it == index_of.end()) throw FormatError("policy names agent '" + id + "' which the model lacks");
        if (covered[it->second]) throw FormatError("agent '" + id + "' appears in two policy clusters");
        covered[it->second] = true;
        members.push_back(it->second);
      }
      auto product = build_product(agents, members);
      auto tp = team_policy_from_file(cp, product);
      const Mdp& m = product.model();
      if (!tp.defined(m.initial())) throw FormatError("policy does not cover the initial joint state");
      auto stationary = to_stationary(tp, m);
      auto chain = induce_dtmc(m, stationary);

      out << "cluster " << (cp.index + 1) << " " << agent_set(members) << '\n';
      for (auto i : members) {
        if (!agents[i].formula) continue;
        auto eval = evaluate_policy(m, stationary, agents[i].formula, synthesis);
        std::vector<pctl::StateFormula> probs;
        top_level_probs(agents[i].formula, probs);
        out << "  " << agents[i].id << ": " << agents[i].formula_text << '\n';
        for (std::size_t k = 0; k < probs.size(); ++k) {
          const auto& prob = std::get<pctl::Prob>(probs[k]->node);
          SimConfig sim;
          sim.trials = options.trials;
          sim.seed = options.seed;
          sim.max_steps = options.max_steps;
          sim.jobs = std::max(1U, options.jobs);
          auto report = estimate_path_prob(chain, resolve_path(m, prob.path, synthesis), sim);
          out << "    " << pctl::to_string(probs[k]) << "  computed " << format_probability(eval.probabilities[k].value)
              << "  estimate " << format_probability(report.estimate) << " +- "
              << format_probability(report.standard_error) << "  (" << report.trials << " trials"
              << (report.truncated ? ", truncated" : "") << ")\n";
        }
      }

      if (trace_file) {
        CounterRng rng(options.seed, 0);
        auto path = simulate_path(chain, m.initial(), options.max_steps, rng);
        std::vector<std::string> actions;
        for (auto s : path.states) actions.push_back(m.action(stationary.choice[s]).label);
        actions.pop_back();
        trace_file << "# cluster " << (cp.index + 1) << '\n';
        write_trace(trace_file, m.state_labels(), path, actions);
      }
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (!covered[i]) throw FormatError("policy file does not cover agent '" + agents[i].id + "'");
    }
    return kSuccess;
  });
}

int cmd_product(const ProductCommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto agents = load_model(options.model);
    validate_action_partition(agents);
    auto clustering =
        compute_clusters(build_dependency_graph(agents, dependency_options(options.horizon, options.require_meeting)));
    if (options.cluster == 0 || options.cluster > clustering.size()) {
      throw std::invalid_argument("--cluster must be between 1 and " + std::to_string(clustering.size()));
    }
    ProductOptions po;
    po.prune_unreachable = options.prune;
    auto product = build_product(agents, clustering.clusters[options.cluster - 1], po);
    auto text = write_product_model(product, agents, "C" + std::to_string(options.cluster));
    if (options.out) {
      write_file(*options.out, text);
      out << "product of cluster " << options.cluster << " (" << product.model().num_states() << " of "
          << product.full_state_count() << " joint states) written to " << *options.out << '\n';
    } else {
      out << text;
    }
    return kSuccess;
  });
}

}  // namespace coplan::cli
