#include <coplan/io.hpp>

#include <json.hpp>

namespace coplan {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

pctl::Comparator parse_comparator(const std::string& text) {
  using pctl::Comparator;
  for (auto c : {Comparator::less, Comparator::greater, Comparator::less_equal, Comparator::greater_equal}) {
    if (pctl::to_string(c) == text) return c;
  }
  throw FormatError("unknown comparator '" + text + "'");
}

ordered_json prob_json(const ProbReport& r) {
  ordered_json j;
  j["formula"] = r.formula;
  j["comparator"] = std::string(pctl::to_string(r.comparator));
  j["threshold"] = r.threshold;
  j["value"] = r.value;
  j["holds"] = r.holds;
  j["unbounded"] = r.unbounded;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["converged"] = r.converged;
  return j;
}

ProbReport prob_from(const json& j) {
  ProbReport r;
  r.formula = j.at("formula").get<std::string>();
  r.comparator = parse_comparator(j.at("comparator").get<std::string>());
  r.threshold = j.at("threshold").get<double>();
  r.value = j.at("value").get<double>();
  r.holds = j.at("holds").get<bool>();
  r.unbounded = j.at("unbounded").get<bool>();
  r.iterations = j.at("iterations").get<std::size_t>();
  r.residual = j.at("residual").get<double>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

}  // namespace

std::string_view to_string(ThresholdMode mode) {
  return mode == ThresholdMode::existential ? "existential" : "universal";
}

ThresholdMode parse_threshold_mode(std::string_view text) {
  if (text == "existential") return ThresholdMode::existential;
  if (text == "universal") return ThresholdMode::universal;
  throw FormatError("unknown threshold mode '" + std::string(text) + "'");
}

PolicyFile make_policy_file(const SolutionBundle& bundle, std::span<const Agent> agents, const SolveConfig& config) {
  if (bundle.status != SolveStatus::solved) throw std::logic_error("only solved bundles produce a policy file");
  PolicyFile out;
  out.mode = std::string(to_string(config.synthesis.mode));
  out.epsilon = config.synthesis.epsilon;
  out.tie_tolerance = config.synthesis.tie_tolerance;
  out.max_policies = config.max_policies;
  for (const auto& c : bundle.clusters) {
    ClusterPolicy cp;
    cp.index = c.index;
    for (auto i : c.members) cp.members.push_back(agents[i].id);
    const Mdp& m = c.product->model();
    for (StateIndex s = 0; s < m.num_states(); ++s) {
      if (c.policy->defined(s)) cp.rows.push_back(TeamRow{m.state_label(s), m.action(c.policy->choice[s]).label});
    }
    cp.policies_checked = c.policies_checked;
    cp.relaxed = c.relaxed;
    cp.reports = c.reports;
    out.clusters.push_back(std::move(cp));
  }
  out.agents = bundle.agent_policies;
  return out;
}

std::string write_policy(const PolicyFile& policy) {
  ordered_json doc;
  doc["mode"] = policy.mode;
  doc["epsilon"] = policy.epsilon;
  doc["tie_tolerance"] = policy.tie_tolerance;
  doc["max_policies"] = policy.max_policies;
  doc["clusters"] = ordered_json::array();
  for (const auto& c : policy.clusters) {
    ordered_json cj;
    cj["index"] = c.index;
    cj["members"] = c.members;
    cj["policies_checked"] = c.policies_checked;
    cj["relaxed_states"] = c.relaxed;
    cj["team_policy"] = ordered_json::array();
    for (const auto& r : c.rows) cj["team_policy"].push_back({{"state", r.state}, {"action", r.action}});
    cj["reports"] = ordered_json::array();
    for (const auto& r : c.reports) {
      ordered_json rj;
      rj["agent"] = r.agent_id;
      rj["formula"] = r.formula;
      rj["holds"] = r.holds;
      rj["probabilities"] = ordered_json::array();
      for (const auto& p : r.probabilities) rj["probabilities"].push_back(prob_json(p));
      cj["reports"].push_back(std::move(rj));
    }
    doc["clusters"].push_back(std::move(cj));
  }
  doc["agents"] = ordered_json::array();
  for (const auto& a : policy.agents) {
    ordered_json aj;
    aj["id"] = a.agent_id;
    aj["index"] = a.agent;
    aj["cluster"] = a.cluster;
    aj["policy"] = ordered_json::array();
    for (const auto& e : a.entries) {
      ordered_json ej;
      ej["context"] = e.context;
      ej["context_state"] = e.context_label;
      ej["local_state"] = e.local_state;
      ej["action"] = e.action.empty() ? ordered_json(nullptr) : ordered_json(e.action);
      aj["policy"].push_back(std::move(ej));
    }
    doc["agents"].push_back(std::move(aj));
  }
  return doc.dump(2) + "\n";
}

PolicyFile parse_policy(std::string_view text) {
  PolicyFile out;
  try {
    const json doc = json::parse(text);
    out.mode = doc.at("mode").get<std::string>();
    parse_threshold_mode(out.mode);
    out.epsilon = doc.at("epsilon").get<double>();
    out.tie_tolerance = doc.at("tie_tolerance").get<double>();
    out.max_policies = doc.at("max_policies").get<std::size_t>();
    for (const auto& cj : doc.at("clusters")) {
      ClusterPolicy c;
      c.index = cj.at("index").get<std::size_t>();
      c.members = cj.at("members").get<std::vector<std::string>>();
      c.policies_checked = cj.at("policies_checked").get<std::size_t>();
      c.relaxed = cj.at("relaxed_states").get<std::vector<StateIndex>>();
      for (const auto& r : cj.at("team_policy")) {
        c.rows.push_back(TeamRow{r.at("state").get<std::string>(), r.at("action").get<std::string>()});
      }
      for (const auto& rj : cj.at("reports")) {
        FormulaReport r;
        r.agent_id = rj.at("agent").get<std::string>();
        r.formula = rj.at("formula").get<std::string>();
        r.holds = rj.at("holds").get<bool>();
        for (const auto& p : rj.at("probabilities")) r.probabilities.push_back(prob_from(p));
        c.reports.push_back(std::move(r));
      }
      out.clusters.push_back(std::move(c));
    }
    for (const auto& aj : doc.at("agents")) {
      AgentPolicy a;
      a.agent_id = aj.at("id").get<std::string>();
      a.agent = aj.at("index").get<AgentIndex>();
      a.cluster = aj.at("cluster").get<std::size_t>();
      for (const auto& ej : aj.at("policy")) {
        LocalPolicyEntry e;
        e.context = ej.at("context").get<StateIndex>();
        e.context_label = ej.at("context_state").get<std::string>();
        e.local_state = ej.at("local_state").get<std::string>();
        const auto& action = ej.at("action");
        if (!action.is_null()) e.action = action.get<std::string>();
        a.entries.push_back(std::move(e));
      }
      out.agents.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed policy file: ") + e.what());
  }
  return out;
}

PolicyFile load_policy(const std::filesystem::path& path) { return parse_policy(read_text_file(path)); }

TeamPolicy team_policy_from_file(const ClusterPolicy& cluster, const ProductMdp& p) {
  const Mdp& m = p.model();
  TeamPolicy tp;
  tp.cluster = cluster.index;
  tp.choice.assign(m.num_states(), kNoAction);
  for (const auto& row : cluster.rows) {
    auto s = m.find_state(row.state);
    if (!s) throw FormatError("policy state '" + row.state + "' is not a state of cluster " +
                              std::to_string(cluster.index + 1));
    auto a = m.find_action(row.action);
    if (!a || !m.is_available(*s, *a)) {
      throw FormatError("policy action '" + row.action + "' is not available at state '" + row.state + "'");
    }
    tp.choice[*s] = *a;
  }
  return tp;
}

}  // namespace coplan
