#include <coplan/io.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace coplan {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string where(std::size_t index, const json& agent) {
  std::string out = "agents[" + std::to_string(index) + "]";
  if (agent.is_object() && agent.contains("id") && agent["id"].is_string()) {
    out += " ('" + agent["id"].get<std::string>() + "')";
  }
  return out;
}

const json& field(const json& obj, const char* name, const std::string& ctx) {
  auto it = obj.find(name);
  if (it == obj.end()) throw FormatError(ctx + ": missing field '" + name + "'");
  return *it;
}

std::string string_field(const json& obj, const char* name, const std::string& ctx) {
  const json& v = field(obj, name, ctx);
  if (!v.is_string()) throw FormatError(ctx + ": field '" + name + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* name, const std::string& ctx, bool required) {
  auto it = obj.find(name);
  if (it == obj.end()) {
    if (required) throw FormatError(ctx + ": missing field '" + name + "'");
    return {};
  }
  if (!it->is_array()) throw FormatError(ctx + ": field '" + name + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) throw FormatError(ctx + ": field '" + name + "' must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

Agent parse_agent(const json& j, std::size_t index) {
  const std::string ctx = where(index, j);
  if (!j.is_object()) throw FormatError(ctx + ": agent must be an object");

  Agent agent;
  agent.id = string_field(j, "id", ctx);
  RawMdp raw;
  raw.states = string_list(j, "states", ctx, true);
  raw.initial = string_field(j, "initial", ctx);
  for (auto& label : string_list(j, "handshake_actions", ctx, false)) {
    raw.actions.push_back(RawAction{std::move(label), ActionKind::handshake});
  }
  for (auto& label : string_list(j, "independent_actions", ctx, false)) {
    raw.actions.push_back(RawAction{std::move(label), ActionKind::independent});
  }
  const json& transitions = field(j, "transitions", ctx);
  if (!transitions.is_array()) throw FormatError(ctx + ": field 'transitions' must be an array");
  for (std::size_t k = 0; k < transitions.size(); ++k) {
    const json& t = transitions[k];
    const std::string tctx = ctx + ".transitions[" + std::to_string(k) + "]";
    if (!t.is_object()) throw FormatError(tctx + ": transition must be an object");
    const json& prob = field(t, "prob", tctx);
    if (!prob.is_number()) throw FormatError(tctx + ": field 'prob' must be a number");
    raw.transitions.push_back(RawTransition{string_field(t, "from", tctx), string_field(t, "action", tctx),
                                            string_field(t, "to", tctx), prob.get<double>()});
  }
  try {
    agent.mdp = build_mdp(raw);
  } catch (const ModelError& e) {
    throw ModelError(ctx + ": " + e.what());
  }

  if (auto it = j.find("formula"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw FormatError(ctx + ": field 'formula' must be a string");
    agent.formula_text = it->get<std::string>();
    try {
      agent.formula = pctl::parse_formula(agent.formula_text);
    } catch (const ParseError& e) {
      throw ParseError(ctx + ": formula: " + std::string(e.what()).substr(0, std::string(e.what()).rfind(" at offset")),
                       e.position());
    }
  }
  return agent;
}

ordered_json agent_json(const std::string& id, const Mdp& m, const std::string& formula) {
  ordered_json j;
  j["id"] = id;
  j["states"] = std::vector<std::string>(m.state_labels().begin(), m.state_labels().end());
  j["initial"] = m.state_label(m.initial());
  std::vector<std::string> shared, own;
  for (const auto& a : m.actions()) (a.kind == ActionKind::handshake ? shared : own).push_back(a.label);
  j["handshake_actions"] = shared;
  j["independent_actions"] = own;
  ordered_json rows = ordered_json::array();
  for (StateIndex s = 0; s < m.num_states(); ++s) {
    for (const auto& c : m.choices(s)) {
      for (const auto& t : c.distribution.entries()) {
        ordered_json row;
        row["from"] = m.state_label(s);
        row["action"] = m.action(c.action).label;
        row["to"] = m.state_label(t.target);
        row["prob"] = t.probability;
        rows.push_back(std::move(row));
      }
    }
  }
  j["transitions"] = std::move(rows);
  if (!formula.empty()) j["formula"] = formula;
  return j;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<Agent> parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw FormatError("model file must be a JSON object");
  const json& agents = field(doc, "agents", "model");
  if (!agents.is_array() || agents.empty()) throw FormatError("model: field 'agents' must be a nonempty array");
  std::vector<Agent> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    out.push_back(parse_agent(agents[i], i));
    if (!ids.insert(out.back().id).second) throw FormatError(where(i, agents[i]) + ": duplicate agent id");
  }
  return out;
}

std::vector<Agent> load_model(const std::filesystem::path& path) { return parse_model(read_text_file(path)); }

std::string write_model(std::span<const Agent> agents) {
  ordered_json doc;
  doc["agents"] = ordered_json::array();
  for (const auto& a : agents) doc["agents"].push_back(agent_json(a.id, a.mdp, a.formula_text));
  return doc.dump(2) + "\n";
}

std::string write_product_model(const ProductMdp& p, std::span<const Agent> agents, const std::string& id) {
  auto formula = mutual_formula(agents, p.members());
  ordered_json doc;
  doc["agents"] = ordered_json::array();
  doc["agents"].push_back(agent_json(id, p.model(), pctl::to_string(formula)));
  return doc.dump(2) + "\n";
}

}  // namespace coplan
